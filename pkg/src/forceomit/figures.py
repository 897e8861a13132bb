"""One-shot presets that regenerate the reference figure set (fig2 to fig5).

Axis ranges are fixed here and recorded in each table's metadata under ``preset``.
"""

from __future__ import annotations

import numpy as np

from .sweep import Axis, SweepTable, delay_vs_force, sideband_forces, sweep

N_POINTS = 1001
FIG4_FRACTIONS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.05)


def _rescale(table: SweepTable, scale: float, name: str, unit: str, **extra) -> SweepTable:
    meta = dict(table.metadata, axis_unit=unit, axis_scale_si=scale, **extra)
    return SweepTable(name, table.axis_values / scale, table.columns, meta, table.errors)


def fig2(params, n_points: int = N_POINTS):
    """(a) q0 versus force at the configured pump power; (b) q0 versus pump power at f = -4e-6 N."""
    a = sweep(params, Axis.FORCE, (-6e-6, 0.0), n_points, ["q0", "delta_eff"])
    a.metadata["preset"] = "fig2a: force range [-6e-6, 0] N"
    # the probe does not move the mirror; zero it so the sweep may start at zero pump
    b = sweep(params.replace(force=-4e-6, probe_power=0.0), Axis.PUMP_POWER, (0.0, 1e-3), n_points, ["q0", "delta_eff"])
    b = _rescale(b, 1e-3, "pump_power", "mW", preset="fig2b: pump power range [0, 1] mW at f = -4e-6 N")
    return {"fig2a": a, "fig2b": b}


def fig3(params, n_points: int = N_POINTS, halfwidth: float = 0.05):
    """Quadrature and delay spectra at the red (f1) and blue (f2) sideband forces."""
    wm = params.omega_m
    f1, f2 = sideband_forces(params)
    out = {}
    for tag_eps, tag_tau, force, centre in (("fig3a", "fig3b", f1, 1.0), ("fig3c", "fig3d", f2, -1.0)):
        p = params.replace(force=force)
        span = ((centre - halfwidth) * wm, (centre + halfwidth) * wm)
        table = sweep(p, Axis.PROBE_DETUNING, span, n_points, ["eps_T", "tau"])
        eps = SweepTable(table.axis_name, table.axis_values, {"eps_T": table.columns["eps_T"]}, dict(table.metadata), table.errors)
        tau = SweepTable(table.axis_name, table.axis_values, {"tau": table.columns["tau"]}, dict(table.metadata), table.errors)
        note = f"force {force:.6g} N; delta/omega_m in [{centre - halfwidth:g}, {centre + halfwidth:g}]"
        out[tag_eps] = _rescale(eps, wm, "delta_over_omega_m", "omega_m", preset=f"{tag_eps}: {note}", force=force)
        out[tag_tau] = _rescale(tau, wm, "delta_over_omega_m", "omega_m", preset=f"{tag_tau}: {note}", force=force)
    return out


def fig4(params, n_points: int = N_POINTS, fractions=FIG4_FRACTIONS, span=(-2.0, 2.0)):
    """Re(eps_T) spectra for a ladder of forces f/f1 under red-sideband conditions."""
    wm = params.omega_m
    f1, _ = sideband_forces(params)
    columns = {}
    errors = [""] * n_points
    grid = None
    for frac in fractions:
        t = sweep(params.replace(force=frac * f1), Axis.PROBE_DETUNING, (span[0] * wm, span[1] * wm), n_points, ["eps_T"])
        grid = t.axis_values
        columns[f"re_eps_T_f{frac:g}"] = t.columns["eps_T"].real
        errors = [a or b for a, b in zip(errors, t.errors)]
    table = SweepTable(
        "delta_over_omega_m",
        grid / wm,
        columns,
        {
            "axis_unit": "omega_m",
            "f1": f1,
            "force_fractions": list(fractions),
            "preset": f"fig4: f/f1 in {list(fractions)}; delta/omega_m in [{span[0]:g}, {span[1]:g}]",
        },
        errors,
    )
    return {"fig4": table}


def fig5(params, n_points: int = N_POINTS, span=(0.9, 1.1)):
    """Full and approximate group delay versus f/f1 (red) and f/f2 (blue)."""
    f1, f2 = sideband_forces(params)
    out = {}
    for tag, sb, fref in (("fig5a", "red", f1), ("fig5b", "blue", f2)):
        t = delay_vs_force(params, sb, (span[0] * fref, span[1] * fref), n_points)
        # fref < 0, so dividing flips the axis direction; keep it ascending
        t = _rescale(t, fref, f"force_over_f_{'1' if sb == 'red' else '2'}", "f_ref", preset=f"{tag}: f/f_ref in {span}", f_ref=fref)
        if t.axis_values[0] > t.axis_values[-1]:
            order = np.arange(len(t))[::-1]
            t = SweepTable(
                t.axis_name,
                t.axis_values[order],
                {k: v[order] for k, v in t.columns.items()},
                t.metadata,
                [t.errors[i] for i in order],
            )
        out[tag] = t
    return out


PRESETS = {"fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5}
