"""Write CSV and SVG for every figure preset at the reference parameters.

    python scripts/reproduce_figures.py --out results/figures
"""

import argparse
import time
import warnings
from pathlib import Path

from forceomit.config import BASELINE_CONFIG_TEXT, load_config, parse_config
from forceomit.figures import PRESETS
from forceomit.steady import UnstableBranchWarning
from forceomit.tables import emit_csv, emit_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="parameter file (default: reference set)")
    ap.add_argument("--out", default="results/figures")
    ap.add_argument("--points", type=int, default=1001)
    ap.add_argument("--no-svg", action="store_true")
    args = ap.parse_args()
    # stability is reported per row; the warning stream only adds noise here
    warnings.simplefilter("ignore", UnstableBranchWarning)

    cfg = load_config(args.config) if args.config else parse_config(BASELINE_CONFIG_TEXT)
    out = Path(args.out)
    for name, preset in PRESETS.items():
        t0 = time.perf_counter()
        tables = preset(cfg.system, n_points=args.points)
        for tag, table in tables.items():
            emit_csv(table, out / f"{tag}.csv")
            if not args.no_svg:
                emit_svg(table, out / f"{tag}.svg", title=table.metadata.get("preset", tag))
        failed = sum(bool(e) for t in tables.values() for e in t.errors)
        print(f"{name}: {', '.join(tables)} in {time.perf_counter() - t0:.2f} s, failed rows {failed}")


if __name__ == "__main__":
    main()
