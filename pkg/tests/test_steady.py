import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from forceomit.errors import MultistableAmbiguity
from forceomit.params import CONSTANTS, baseline_params, derive
from forceomit.steady import (
    ContinuationFromZeroPump,
    IndexSelect,
    UniqueReal,
    UnstableBranchWarning,
    branch_policy_name,
    cubic_coefficients,
    parse_branch_policy,
    solve_steady_state,
    stability_eigenvalues,
    steady_residual,
)


@pytest.fixture
def bistable():
    # strong blue-detuned pump: three real roots at f = 0
    return baseline_params().replace(pump_power=0.05, delta_c=3 * baseline_params().omega_m)


def quiet(params, branch=None, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnstableBranchWarning)
        return solve_steady_state(params, branch, **kw)


# --- cubic coefficients -------------------------------------------------------


def test_zero_drive_zero_force_has_root_at_origin():
    p = baseline_params().replace(pump_power=0.0, probe_power=0.0)
    c = cubic_coefficients(p)
    assert c.a0 == 0.0
    assert c.evaluate(0.0) == 0.0


def test_undriven_cubic_factorizes_at_static_displacement():
    p = baseline_params().replace(pump_power=0.0, probe_power=0.0, force=-4e-6)
    c = cubic_coefficients(p)
    q = p.force / (p.mass * p.omega_m**2)
    assert c.normalized_residual(q) < 1e-14


def test_a3_by_independent_arithmetic():
    p = baseline_params().replace(force=-4e-6)
    d = derive(p)
    c = cubic_coefficients(p, d)
    hbar = 1.054571817e-34
    expected = 1.45e-10 * (2 * math.pi * 947e3) ** 2 * (hbar * d.omega_c / 0.025) ** 2 / hbar**2
    assert c.a3 == pytest.approx(expected, rel=1e-14)
    assert all(math.isfinite(v) for v in (c.a3, c.a2, c.a1, c.a0))
    assert c.a3 > 0
    assert c.a0 == pytest.approx(-(p.force * (p.kappa**2 + p.delta_c**2) + d.chi * d.eps_d**2), rel=1e-15)


# --- solver -------------------------------------------------------------------


def test_undriven_force_only():
    p = baseline_params().replace(pump_power=0.0, probe_power=0.0, force=-4e-6)
    s = solve_steady_state(p)
    assert s.q0 == pytest.approx(-7.792e-10, rel=1e-3)
    assert s.q0 == pytest.approx(p.force / (p.mass * p.omega_m**2), rel=1e-14)


def test_undriven_equilibrium():
    p = baseline_params().replace(pump_power=0.0, probe_power=0.0)
    s = solve_steady_state(p)
    assert s.q0 == 0.0
    assert s.c0 == 0.0
    assert s.delta_eff == p.delta_c


def test_state_invariants_at_sideband_force(red_point):
    p, s = red_point
    d = derive(p)
    assert s.p0 == 0.0
    assert s.n_cav == pytest.approx(d.eps_d**2 / (p.kappa**2 + s.delta_eff**2), rel=1e-12)
    assert s.beta >= 0 and s.n_cav >= 0
    self_consistent = (d.chi * s.n_cav + p.force) / (p.mass * p.omega_m**2)
    assert s.q0 == pytest.approx(self_consistent, rel=1e-10)
    assert s.delta_eff == pytest.approx(p.delta_c - d.chi * s.q0 / CONSTANTS.hbar, rel=1e-15)
    assert cubic_coefficients(p, d).normalized_residual(s.q0) < 1e-10


def test_q0_increases_with_force_over_fig2_range():
    p = baseline_params()
    q = [solve_steady_state(p.replace(force=f)).q0 for f in np.linspace(-6e-6, 0.0, 41)]
    assert np.all(np.diff(q) > 0)


def test_unique_real_rejects_bistable(bistable):
    with pytest.raises(MultistableAmbiguity) as exc:
        solve_steady_state(bistable, UniqueReal())
    assert len(exc.value.roots) == 3


def test_unique_real_accepts_baseline():
    p = baseline_params().replace(force=-4e-6)
    assert quiet(p, UniqueReal()).q0 == pytest.approx(quiet(p).q0, rel=1e-14)


def test_index_select_orders_roots(bistable):
    roots = [quiet(bistable, IndexSelect(k)).q0 for k in range(3)]
    assert roots == sorted(roots)
    assert len(set(roots)) == 3
    c = cubic_coefficients(bistable)
    for q in roots:
        assert c.normalized_residual(q) < 1e-10
    with pytest.raises(ValueError):
        solve_steady_state(bistable, IndexSelect(3))


def test_continuation_follows_branch_connected_to_zero_pump(bistable):
    s = quiet(bistable)
    assert s.q0 == quiet(bistable, IndexSelect(0)).q0


def test_continuation_policy_needs_enough_steps():
    with pytest.raises(ValueError):
        ContinuationFromZeroPump(steps=4)


@pytest.mark.parametrize(
    "text,policy",
    [("unique", UniqueReal()), ("continuation", ContinuationFromZeroPump()), ("index:2", IndexSelect(2))],
)
def test_branch_policy_text_round_trip(text, policy):
    assert parse_branch_policy(text) == policy
    assert branch_policy_name(policy) == text


def test_unstable_branch_is_flagged(blue_point):
    p, _ = blue_point
    with pytest.warns(UnstableBranchWarning):
        s = solve_steady_state(p)
    assert not s.stable
    assert np.max(stability_eigenvalues(p, s).real) > 0


def test_red_sideband_point_is_stable(red_point):
    p, s = red_point
    assert s.stable
    assert np.max(stability_eigenvalues(p, s).real) < 0


@settings(max_examples=60, deadline=None)
@given(
    # tiny forces and subnormal powers put the root below the smallest double
    force=st.floats(min_value=-8e-6, max_value=2e-6).filter(lambda f: f == 0 or abs(f) > 1e-290),
    pump=st.one_of(st.just(0.0), st.floats(min_value=1e-15, max_value=1e-3)),
)
def test_root_verification_property(force, pump):
    p = baseline_params().replace(force=force, pump_power=pump, probe_power=0.0)
    s = quiet(p)
    assert cubic_coefficients(p).normalized_residual(s.q0) < 1e-10
    assert max(steady_residual(p, s)) < 1e-10


# --- residuals ----------------------------------------------------------------


def test_residuals_vanish_at_solution(red_point):
    p, s = red_point
    assert max(steady_residual(p, s)) < 1e-10


def test_residuals_sensitive_to_perturbation(red_point):
    p, s = red_point
    from dataclasses import replace

    _, r_p, _ = steady_residual(p, replace(s, q0=s.q0 * (1 + 1e-3)))
    assert r_p > 1e-4


def test_residuals_zero_for_trivial_state():
    p = baseline_params().replace(pump_power=0.0, probe_power=0.0)
    s = solve_steady_state(p)
    assert steady_residual(p, s) == (0.0, 0.0, 0.0)
