import numpy as np
import pytest

from forceomit.dynamics import integrate_mean_dynamics, integrate_trajectory
from forceomit.errors import NonConvergence
from forceomit.params import baseline_params
from forceomit.steady import solve_steady_state


def test_free_oscillator_decays_to_rest():
    p = baseline_params().replace(pump_power=0.0, probe_power=0.0, gamma_m=0.05 * baseline_params().omega_m)
    s = integrate_mean_dynamics(p, initial=(1e-12, 0.0, 0.0))
    assert abs(s.q0) < 1e-12 * 1e-6
    assert s.c0 == 0.0


def test_oracle_at_red_sideband_force(red_point):
    p, s = red_point
    ode, rep = integrate_mean_dynamics(p, report=True)
    assert ode.q0 == pytest.approx(s.q0, rel=1e-6)
    assert rep.spread < 1e-8
    assert rep.periods > 0 and rep.steps > 0


def test_oracle_at_fig2_operating_point():
    # -4e-6 N sits on the blue side, unstable under gamma_m alone
    p = baseline_params().replace(force=-4e-6)
    s = solve_steady_state(p)
    assert not s.stable
    ode = integrate_mean_dynamics(p, auxiliary_damping=0.05 * p.omega_m)
    assert ode.q0 == pytest.approx(s.q0, rel=1e-6)


def test_unstable_point_does_not_settle_without_help():
    p = baseline_params().replace(force=-4e-6)
    with pytest.raises(NonConvergence) as exc:
        integrate_mean_dynamics(p, t_end=2e-3)
    assert exc.value.last_state is not None
    assert exc.value.residual > 1e-8


def test_short_horizon_reports_non_convergence():
    p = baseline_params().replace(force=-1e-6)
    with pytest.raises(NonConvergence):
        integrate_mean_dynamics(p, t_end=1e-6)


def test_trajectory_matches_undamped_harmonic_motion():
    p = baseline_params().replace(pump_power=0.0, probe_power=0.0, gamma_m=0.0)
    t = np.linspace(0.0, 5 * 2 * np.pi / p.omega_m, 50)
    q, mom, c = integrate_trajectory(p, (1e-12, 0.0, 0.0), t)
    np.testing.assert_allclose(q, 1e-12 * np.cos(p.omega_m * t), atol=1e-20)
    assert np.all(c == 0)
