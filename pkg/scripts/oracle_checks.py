"""Cross-check the fast solvers against their independent oracles.

Prints, per force on a grid between 1.2 f1 and 0: the cubic root against the
time-domain fixed point, the stability verdict, and the worst pairwise spread
of the three c_plus evaluations over a probe-detuning grid.

    python scripts/oracle_checks.py --points 10
"""

import argparse
import time

import numpy as np

from forceomit import response as rsp
from forceomit.dynamics import integrate_mean_dynamics
from forceomit.params import baseline_params
from forceomit.steady import cubic_coefficients, solve_steady_state
from forceomit.sweep import sideband_forces


def identity_spread(params, state, n=1001):
    delta = np.linspace(-2.0, 2.0, n) * params.omega_m
    cf = rsp.eps_T_full(state, params, delta)
    closed = 2 * params.kappa * rsp.c_plus_closed_form(state, params, delta)
    lin = 2 * params.kappa * np.array([rsp.solve_sideband_linear_system(state, params, d)[1] for d in delta])
    return max(float(np.max(np.abs(a - b) / np.abs(b))) for a, b in ((cf, closed), (cf, lin), (closed, lin)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=10)
    ap.add_argument("--aux-damping", type=float, default=0.05, help="extra damping at unstable points, units of omega_m")
    args = ap.parse_args()

    import warnings

    warnings.simplefilter("ignore", RuntimeWarning)
    base = baseline_params()
    f1, f2 = sideband_forces(base)
    print(f"f1 = {f1:.6e} N, f2 = {f2:.6e} N")
    print(f"{'force (N)':>13} {'Delta/wm':>9} {'stable':>6} {'q0 rel err':>10} {'residual':>9} {'identity':>9} {'t (s)':>6}")
    for f in np.linspace(1.2 * f1, 0.0, args.points):
        p = base.replace(force=float(f))
        s = solve_steady_state(p)
        aux = 0.0 if s.stable else args.aux_damping * p.omega_m
        t0 = time.perf_counter()
        ode = integrate_mean_dynamics(p, auxiliary_damping=aux)
        dt = time.perf_counter() - t0
        err = abs(s.q0 - ode.q0) / abs(ode.q0)
        res = cubic_coefficients(p).normalized_residual(s.q0)
        print(
            f"{f:13.5e} {s.delta_eff / p.omega_m:9.4f} {str(s.stable):>6} {err:10.2e} {res:9.1e} "
            f"{identity_spread(p, s):9.1e} {dt:6.2f}"
        )

    print("\ngroup delay, analytic vs finite difference")
    for label, f in (("f1", f1), ("f2", f2), ("0.9 f1", 0.9 * f1), ("0.9 f2", 0.9 * f2)):
        p = base.replace(force=f)
        s = solve_steady_state(p)
        for sb in ("red", "blue"):
            a = rsp.group_delay(s, p, sb, "analytic")
            fd = rsp.group_delay(s, p, sb, "finite_difference")
            print(f"  {label:>7} {sb:>4}: tau = {a.tau: .6e} s, rel dev {abs(a.tau - fd.tau) / max(abs(a.tau), 1e-15):.1e}")


if __name__ == "__main__":
    main()
