"""Force-sensing summary: delay slopes, approximation gaps and inversion accuracy.

    python scripts/force_sensing.py
"""

import argparse
import warnings

import numpy as np

from forceomit.params import baseline_params
from forceomit.sweep import delay_at_force, delay_slope, invert_force_from_delay, sideband_forces


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--window", type=float, default=1e-3, help="relative half-width of the slope fit")
    args = ap.parse_args()
    warnings.simplefilter("ignore", RuntimeWarning)

    base = baseline_params()
    f1, f2 = sideband_forces(base)
    for sb, fref in (("red", f1), ("blue", f2)):
        fit = delay_slope(base, sb, fref, args.window)
        tau = delay_at_force(base, fref, sb)
        approx = delay_at_force(base, fref, sb, approx=True)
        print(f"{sb:>4} sideband at f = {fref:.6e} N")
        print(f"     tau = {tau:.6e} s, approximate {approx:.6e} s ({abs(approx - tau) / abs(tau):.2%} apart)")
        print(f"     d tau/d f = {fit.slope:.2f} s/N, |d tau/d f| = {abs(fit.slope):.2f} s/N, "
              f"curvature ratio {fit.curvature_ratio:.3f}")
        errs = []
        for k in np.linspace(0.995, 1.005, 5):
            f = k * fref
            got = invert_force_from_delay(base, sb, delay_at_force(base, f, sb), 1.001 * f)
            errs.append(abs(got - f) / abs(f))
        print(f"     inversion: worst relative force error {max(errs):.1e} over 5 forces")


if __name__ == "__main__":
    main()
