"""Command-line entry point: ``forceomit <subcommand> [options]``.

Exit codes: 0 success, 2 configuration/usage error, 3 bracket failure,
4 multistable ambiguity, 5 non-convergence, 6 singular sideband system,
7 degenerate response denominator, 8 zero transmission, 9 nonlinear slope
window, 10 delay out of monotone range, 11 output I/O failure, 1 anything else.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import response as rsp
from .config import BASELINE_CONFIG_TEXT, RunConfig, load_config, parse_config
from .errors import ForceOmitError
from .figures import PRESETS
from .steady import solve_steady_state
from .sweep import Axis, SweepTable, calibrate_force, delay_at_force, delay_vs_force, invert_force_from_delay, sweep
from .tables import emit_csv, emit_svg

log = logging.getLogger("forceomit")


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else parse_config(BASELINE_CONFIG_TEXT)
    if args.out is not None:
        cfg = replace(cfg, output_dir=Path(args.out))
    if args.svg:
        cfg = replace(cfg, emit_svg=True)
    return cfg


def _params(cfg: RunConfig, args):
    params = cfg.system
    if getattr(args, "force", None) is not None:
        params = params.replace(force=args.force)
    return params


def _write(cfg: RunConfig, name: str, table: SweepTable, title: str = "") -> Path:
    path = emit_csv(table, cfg.output_dir / f"{name}.csv")
    if cfg.emit_svg:
        emit_svg(table, cfg.output_dir / f"{name}.svg", title=title or name)
    return path


def _single_row(axis_name: str, axis_value: float, metadata=None, **columns) -> SweepTable:
    return SweepTable(axis_name, np.array([axis_value]), {k: np.array([v]) for k, v in columns.items()}, metadata or {})


def cmd_steady(cfg, args):
    params = _params(cfg, args)
    state = solve_steady_state(params, cfg.branch_policy)
    table = _single_row(
        "force",
        params.force,
        {"axis_unit": "N"},
        q0=state.q0,
        p0=state.p0,
        c0=state.c0,
        delta_eff=state.delta_eff,
        beta=state.beta,
        n_cav=state.n_cav,
        stable=float(state.stable),
    )
    _write(cfg, "steady", table)
    print(
        f"q0={state.q0:.10g} m delta_eff/omega_m={state.delta_eff / params.omega_m:.10g} "
        f"n_cav={state.n_cav:.6g} beta={state.beta:.6g} stable={state.stable}"
    )


def cmd_spectrum(cfg, args):
    params = _params(cfg, args)
    wm = params.omega_m
    table = sweep(
        params,
        Axis.PROBE_DETUNING,
        (args.delta_min * wm, args.delta_max * wm),
        args.points,
        ["eps_T", "eps_T_rwa", "eps_T_antirwa", "transmission", "phase", "tau"],
        branch=cfg.branch_policy,
    )
    table = SweepTable(
        "delta_over_omega_m",
        table.axis_values / wm,
        table.columns,
        dict(table.metadata, axis_unit="omega_m"),
        table.errors,
    )
    path = _write(cfg, "spectrum", table)
    re = table.columns["eps_T"].real
    i = int(np.nanargmin(re))
    print(f"points={len(table)} min Re(eps_T)={re[i]:.6g} at delta/omega_m={table.axis_values[i]:.6g} -> {path}")


def cmd_delay(cfg, args):
    params = _params(cfg, args)
    state = solve_steady_state(params, cfg.branch_policy)
    delta = None if args.delta is None else args.delta * params.omega_m
    analytic = rsp.group_delay(state, params, args.sideband, "analytic", delta)
    fd = rsp.group_delay(state, params, args.sideband, "finite_difference", delta)
    table = _single_row(
        "force",
        params.force,
        {"axis_unit": "N", "sideband": args.sideband, "delta": analytic.delta},
        tau_analytic=analytic.tau,
        tau_finite_difference=fd.tau,
        tau_rwa_approx=analytic.tau_rwa_approx,
        tau_antirwa_approx=analytic.tau_antirwa_approx,
    )
    _write(cfg, "delay", table)
    print(
        f"tau={analytic.tau:.10g} s (finite difference {fd.tau:.10g} s) sideband={args.sideband} "
        f"delta_eff/omega_m={state.delta_eff / params.omega_m:.6g}"
    )


def cmd_calibrate(cfg, args):
    params = cfg.system
    result = calibrate_force(params, args.target_delta * params.omega_m, branch=cfg.branch_policy)
    table = _single_row(
        "target_delta_over_omega_m",
        args.target_delta,
        {"axis_unit": "omega_m"},
        force=result.force,
        achieved_delta_over_omega_m=result.achieved_delta / params.omega_m,
        iterations=float(result.iterations),
    )
    _write(cfg, "calibrate", table)
    print(f"f={result.force:.6e} N target_delta/omega_m={args.target_delta:g} iterations={result.iterations}")


def cmd_sweep_force(cfg, args):
    params = cfg.system
    f_min = args.f_min
    f_max = args.f_max
    if f_min is None:
        f_min = 1.2 * calibrate_force(params, params.omega_m, branch=cfg.branch_policy).force
    if f_max is None:
        f_max = 0.0
    table = sweep(
        params,
        Axis.FORCE,
        (f_min, f_max),
        args.points,
        ["q0", "delta_eff", "eps_T", "tau_red", "tau_blue"],
        branch=cfg.branch_policy,
        probe_delta=(1.0 if args.sideband == "red" else -1.0) * params.omega_m,
    )
    table.metadata["axis_unit"] = "N"
    _write(cfg, "sweep_force", table)
    delays = delay_vs_force(params, args.sideband, (f_min, f_max), args.points, branch=cfg.branch_policy)
    _write(cfg, f"delay_vs_force_{args.sideband}", delays)
    failed = sum(1 for e in table.errors if e)
    print(f"points={len(table)} force=[{f_min:.6g}, {f_max:.6g}] N failed_rows={failed}")


def cmd_invert(cfg, args):
    params = cfg.system
    f = invert_force_from_delay(params, args.sideband, args.tau, args.f_guess, branch=cfg.branch_policy)
    check = delay_at_force(params, f, args.sideband, branch=cfg.branch_policy)
    table = _single_row("tau_measured", args.tau, {"axis_unit": "s", "sideband": args.sideband}, force=f, tau_at_force=check)
    _write(cfg, "invert", table)
    print(f"f={f:.12e} N tau={check:.10g} s sideband={args.sideband}")


def cmd_figure(cfg, args):
    tables = PRESETS[args.command](cfg.system)
    for name, table in tables.items():
        _write(cfg, name, table)
    print(f"{args.command}: wrote {', '.join(sorted(tables))} to {cfg.output_dir}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value parameter file (default: reference parameter set)")
    common.add_argument("--out", help="output directory (overrides config output_dir)")
    common.add_argument("--svg", action="store_true", help="also write SVG plots")

    parser = argparse.ArgumentParser(prog="forceomit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady", parents=[common], help="mirror steady state")
    p.add_argument("--force", type=float, help="external force (N)")
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("spectrum", parents=[common], help="probe-detuning sweep of eps_T, transmission and phase")
    p.add_argument("--force", type=float)
    p.add_argument("--delta-min", type=float, default=0.5, help="in units of omega_m")
    p.add_argument("--delta-max", type=float, default=1.5, help="in units of omega_m")
    p.add_argument("--points", type=int, default=1001)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("delay", parents=[common], help="group delay at a sideband")
    p.add_argument("--force", type=float)
    p.add_argument("--sideband", choices=["red", "blue"], default="red")
    p.add_argument("--delta", type=float, help="override evaluation detuning (units of omega_m)")
    p.set_defaults(func=cmd_delay)

    p = sub.add_parser("calibrate", parents=[common], help="force giving a target effective detuning")
    p.add_argument("--target-delta", type=float, required=True, help="in units of omega_m")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("sweep-force", parents=[common], help="observables and delays versus force")
    p.add_argument("--f-min", type=float, help="N (default 1.2 f1)")
    p.add_argument("--f-max", type=float, help="N (default 0)")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--sideband", choices=["red", "blue"], default="red")
    p.set_defaults(func=cmd_sweep_force)

    for name in PRESETS:
        p = sub.add_parser(name, parents=[common], help=f"reproduce {name}")
        p.set_defaults(func=cmd_figure)

    p = sub.add_parser("invert", parents=[common], help="force from a measured group delay")
    p.add_argument("--tau", type=float, required=True, help="measured delay (s)")
    p.add_argument("--f-guess", type=float, required=True, help="initial force guess (N)")
    p.add_argument("--sideband", choices=["red", "blue"], default="red")
    p.set_defaults(func=cmd_invert)
    return parser


def _join_negative_values(argv):
    """Attach values such as ``-4e-6`` to their flag; argparse takes them for options."""
    out = []
    argv = list(argv)
    i = 0
    while i < len(argv):
        token = argv[i]
        if token.startswith("--") and "=" not in token and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            try:
                float(argv[i + 1])
            except ValueError:
                pass
            else:
                out.append(f"{token}={argv[i + 1]}")
                i += 2
                continue
        out.append(token)
        i += 1
    return out


def run_subcommand(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _config(args)
        with warnings.catch_warnings():
            if not args.verbose:
                warnings.simplefilter("ignore", RuntimeWarning)
            args.func(cfg, args)
    except ForceOmitError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error [ConfigError]: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> None:
    sys.exit(run_subcommand(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
