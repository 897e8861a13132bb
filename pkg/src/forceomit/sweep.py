"""Parameter sweeps, force calibration and force-from-delay inversion."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.optimize import brentq

from . import response as rsp
from .errors import BracketFailure, ForceOmitError, NonlinearWindow, OutOfMonotoneRange
from .params import CONSTANTS, SystemParams, derive
from .response import Sideband
from .steady import ContinuationFromZeroPump, SteadyState, branch_policy_name, solve_steady_state


class Axis(enum.Enum):
    FORCE = "force"
    PROBE_DETUNING = "probe_detuning"
    PUMP_POWER = "pump_power"


AXIS_UNITS = {Axis.FORCE: "N", Axis.PROBE_DETUNING: "rad/s", Axis.PUMP_POWER: "W"}

OBSERVABLES = frozenset(
    {
        "q0",
        "delta_eff",
        "n_cav",
        "eps_T",
        "eps_T_rwa",
        "eps_T_antirwa",
        "transmission",
        "phase",
        "tau",
        "tau_red",
        "tau_blue",
    }
)


@dataclass
class SweepTable:
    """Tabulated sweep output.

    ``columns`` maps names to arrays of the axis length; complex columns stay
    complex here and are split into real/imaginary parts on export. ``errors``
    holds one entry per row: an empty string, or the error class name when that
    row could not be evaluated (its values are NaN).
    """

    axis_name: str
    axis_values: np.ndarray
    columns: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.axis_values = np.asarray(self.axis_values, dtype=float)
        n = len(self.axis_values)
        for name, col in self.columns.items():
            if len(col) != n:
                raise ValueError(f"column {name!r} has length {len(col)}, axis has {n}")
        if n > 1:
            steps = np.diff(self.axis_values)
            if not (np.all(steps > 0) or np.all(steps < 0)):
                raise ValueError("axis values must be strictly monotone")
        if not self.errors:
            self.errors = [""] * n

    def __len__(self):
        return len(self.axis_values)


def _metadata(params: SystemParams, branch, **extra):
    meta = {"system": asdict(params), "branch_policy": branch_policy_name(branch)}
    meta.update(extra)
    return meta


def _evaluate(obs, params, state, delta_probe):
    """Observable values at one operating point; ``delta_probe`` is the probe detuning."""
    wm = params.omega_m
    out = {}
    for name in obs:
        if name == "q0":
            out[name] = state.q0
        elif name == "delta_eff":
            out[name] = state.delta_eff
        elif name == "n_cav":
            out[name] = state.n_cav
        elif name == "eps_T":
            out[name] = rsp.eps_T_full(state, params, delta_probe)
        elif name == "eps_T_rwa":
            out[name] = rsp.eps_T_rwa(state, params, delta_probe)
        elif name == "eps_T_antirwa":
            out[name] = rsp.eps_T_antirwa(state, params, delta_probe)
        elif name == "transmission":
            out[name] = rsp.transmission(rsp.eps_T_full(state, params, delta_probe))
        elif name == "phase":
            out[name] = rsp.phase(rsp.transmission(rsp.eps_T_full(state, params, delta_probe)))
        elif name == "tau":
            out[name] = rsp.group_delay(state, params, Sideband.RED, delta=delta_probe).tau
        elif name == "tau_red":
            out[name] = rsp.group_delay(state, params, Sideband.RED).tau
        elif name == "tau_blue":
            out[name] = rsp.group_delay(state, params, Sideband.BLUE).tau
        else:
            raise ValueError(f"unknown observable {name!r}")
    del wm
    return out


_COMPLEX = {"eps_T", "eps_T_rwa", "eps_T_antirwa", "transmission"}


def sweep(
    params: SystemParams,
    axis: Axis | str,
    value_range,
    n_points: int,
    observables,
    *,
    branch=None,
    probe_delta: float | None = None,
) -> SweepTable:
    """Evaluate observables along a force, probe-detuning or pump-power axis.

    Args:
        params: base parameters; the swept field is overridden per point.
        axis: ``Axis.FORCE`` (N), ``Axis.PROBE_DETUNING`` (rad/s) or
            ``Axis.PUMP_POWER`` (W).
        value_range: ``(start, stop)`` of the axis, inclusive.
        n_points: number of grid points (>= 2).
        observables: subset of ``OBSERVABLES``. ``tau`` is the delay at each
            grid detuning and only makes sense on the probe-detuning axis.
        branch: steady-state branch policy (default continuation).
        probe_delta: probe detuning for the spectral observables on the force
            and pump-power axes; defaults to +omega_m.
    """
    axis = Axis(axis)
    obs = list(dict.fromkeys(observables))
    unknown = set(obs) - OBSERVABLES
    if unknown:
        raise ValueError(f"unknown observables: {sorted(unknown)}")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    lo, hi = value_range
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("sweep range must be finite")
    if branch is None:
        branch = ContinuationFromZeroPump()
    grid = np.linspace(lo, hi, n_points)
    if probe_delta is None:
        probe_delta = params.omega_m

    columns = {name: np.full(n_points, np.nan + (0j if name in _COMPLEX else 0.0)) for name in obs}
    errors = [""] * n_points

    if axis is Axis.PROBE_DETUNING:
        try:
            state = solve_steady_state(params, branch)
        except ForceOmitError as exc:
            errors = [type(exc).__name__] * n_points
        else:
            for i, delta in enumerate(grid):
                try:
                    row = _evaluate(obs, params, state, delta)
                except ForceOmitError as exc:
                    errors[i] = type(exc).__name__
                    continue
                for name, value in row.items():
                    columns[name][i] = value
            if "phase" in columns:
                columns["phase_unwrapped"] = np.unwrap(columns["phase"])
    else:
        seed = None
        continuing = isinstance(branch, ContinuationFromZeroPump)
        for i, value in enumerate(grid):
            point = params.replace(force=value) if axis is Axis.FORCE else params.replace(pump_power=value)
            try:
                state = solve_steady_state(point, branch, seed_q0=seed if continuing else None)
                row = _evaluate(obs, point, state, probe_delta)
            except ForceOmitError as exc:
                errors[i] = type(exc).__name__
                continue
            seed = state.q0
            for name, col in row.items():
                columns[name][i] = col

    return SweepTable(
        axis_name=f"{axis.value}",
        axis_values=grid,
        columns=columns,
        metadata=_metadata(params, branch, axis_unit=AXIS_UNITS[axis], probe_delta=probe_delta),
        errors=errors,
    )


# --- calibration -------------------------------------------------------------


@dataclass(frozen=True)
class CalibrationResult:
    force: float
    target_delta: float
    achieved_delta: float
    iterations: int
    bracket: tuple[float, float]
    state: SteadyState | None = None


def linear_force_estimate(params: SystemParams, target_delta: float) -> float:
    """Force that shifts the detuning to ``target_delta`` when radiation pressure is ignored."""
    chi = derive(params).chi
    return params.mass * params.omega_m**2 * CONSTANTS.hbar * (params.delta_c - target_delta) / chi


def calibrate_force(
    params: SystemParams, target_delta: float, *, branch=None, xtol: float = 1e-15, widen: float = 0.1
) -> CalibrationResult:
    """Find the external force at which the effective detuning equals ``target_delta``.

    The bracket is the radiation-pressure-free estimate widened by ``widen``
    (relative) on both sides, then Brent's method runs on Delta(f) - target.

    Raises:
        BracketFailure: no sign change over the widened bracket.
    """
    if branch is None:
        branch = ContinuationFromZeroPump()
    f_star = linear_force_estimate(params, target_delta)
    # a zero estimate still needs a finite bracket: use the force of a 0.1 omega_m shift
    floor = widen * abs(linear_force_estimate(params, params.delta_c - params.omega_m))
    half = max(widen * abs(f_star), floor)
    bracket = (f_star - half, f_star + half)

    def mismatch(f):
        state = solve_steady_state(params.replace(force=f), branch, check_stability=False)
        return (state.delta_eff - target_delta) / params.omega_m

    ends = (mismatch(bracket[0]), mismatch(bracket[1]))
    if ends[0] == 0.0:
        force, iterations = bracket[0], 0
    elif ends[1] == 0.0:
        force, iterations = bracket[1], 0
    elif ends[0] * ends[1] > 0:
        raise BracketFailure(bracket, ends)
    else:
        force, info = brentq(mismatch, *bracket, xtol=xtol, maxiter=100, full_output=True)
        iterations = info.iterations
    state = solve_steady_state(params.replace(force=force), branch)
    return CalibrationResult(
        force=float(force),
        target_delta=float(target_delta),
        achieved_delta=state.delta_eff,
        iterations=iterations,
        bracket=bracket,
        state=state,
    )


def sideband_forces(params: SystemParams, branch=None) -> tuple[float, float]:
    """Forces putting the system on the red (+omega_m) and blue (-omega_m) sideband."""
    red = calibrate_force(params, params.omega_m, branch=branch).force
    blue = calibrate_force(params, -params.omega_m, branch=branch).force
    return red, blue


# --- delay versus force --------------------------------------------------------


def delay_at_force(params: SystemParams, force: float, sideband, *, branch=None, approx: bool = False, beta_override=None) -> float:
    sideband = Sideband(sideband)
    point = params.replace(force=force)
    state = solve_steady_state(point, branch, check_stability=False)
    if beta_override is not None:
        state = state.with_beta(beta_override)
    delta = sideband.detuning(params.omega_m)
    if approx:
        if sideband is Sideband.RED:
            return rsp.tau_rwa(state, point, delta)
        return rsp.tau_antirwa(state, point, delta)
    return rsp.group_delay(state, point, sideband).tau


def delay_vs_force(params: SystemParams, sideband, f_range, n_points: int, *, branch=None, beta_override=None) -> SweepTable:
    """Full and approximate group delay over a force range (Fig. 5 style)."""
    sideband = Sideband(sideband)
    grid = np.linspace(f_range[0], f_range[1], n_points)
    full = np.full(n_points, np.nan)
    approx = np.full(n_points, np.nan)
    errors = [""] * n_points
    for i, f in enumerate(grid):
        try:
            full[i] = delay_at_force(params, f, sideband, branch=branch, beta_override=beta_override)
            approx[i] = delay_at_force(params, f, sideband, branch=branch, approx=True, beta_override=beta_override)
        except ForceOmitError as exc:
            errors[i] = type(exc).__name__
    return SweepTable(
        axis_name=Axis.FORCE.value,
        axis_values=grid,
        columns={"tau_full": full, "tau_approx": approx},
        metadata=_metadata(
            params,
            branch or ContinuationFromZeroPump(),
            axis_unit="N",
            sideband=sideband.value,
            approximation="rwa" if sideband is Sideband.RED else "antirwa",
        ),
        errors=errors,
    )


@dataclass(frozen=True)
class SlopeFit:
    """Linear fit of delay against force.

    ``slope`` is the signed d tau / d f in s/N. ``residual`` is the RMS misfit of
    the linear model (s). ``curvature_ratio`` compares the quadratic term of a
    degree-2 fit with the linear term at the window edge.
    """

    slope: float
    intercept: float
    residual: float
    curvature_ratio: float
    forces: np.ndarray
    delays: np.ndarray


def delay_slope(
    params: SystemParams,
    sideband,
    f_center: float,
    rel_halfwidth: float = 1e-3,
    *,
    n_points: int = 11,
    max_curvature_ratio: float | None = 0.2,
    branch=None,
    beta_override=None,
) -> SlopeFit:
    """Least-squares slope of tau(f) over ``f_center * (1 +- rel_halfwidth)``.

    ``max_curvature_ratio=None`` disables the linearity check, which is
    meaningless at an extremum of tau(f) where the linear term vanishes.

    Raises:
        NonlinearWindow: the quadratic term exceeds ``max_curvature_ratio``
            times the linear one at the window edge.
    """
    half = abs(f_center) * rel_halfwidth
    forces = np.linspace(f_center - half, f_center + half, n_points)
    delays = np.array([delay_at_force(params, f, sideband, branch=branch, beta_override=beta_override) for f in forces])
    x = forces - f_center
    lin = np.polyfit(x, delays, 1)
    quad = np.polyfit(x, delays, 2)
    resid = float(np.sqrt(np.mean((np.polyval(lin, x) - delays) ** 2)))
    linear_term = abs(quad[1]) * half
    quadratic_term = abs(quad[0]) * half**2
    if linear_term == 0.0:
        ratio = 0.0 if quadratic_term == 0.0 else math.inf
    else:
        ratio = quadratic_term / linear_term
    if max_curvature_ratio is not None and ratio > max_curvature_ratio:
        raise NonlinearWindow(
            f"quadratic term is {100 * ratio:.1f}% of the linear term over +-{rel_halfwidth:g} relative window"
        )
    return SlopeFit(
        slope=float(lin[0]),
        intercept=float(lin[1]),
        residual=resid,
        curvature_ratio=float(ratio),
        forces=forces,
        delays=delays,
    )


def invert_force_from_delay(
    params: SystemParams,
    sideband,
    tau_measured: float,
    f_guess: float,
    *,
    rel_halfwidth: float = 5e-3,
    rtol: float = 1e-13,
    maxiter: int = 50,
    branch=None,
) -> float:
    """Force at which the group delay equals ``tau_measured``.

    A bracket ``f_guess * (1 +- rel_halfwidth)`` is shrunk until tau is
    monotone on it. Newton steps use the local slope from ``delay_slope`` and
    fall back to bisection whenever a step would leave the current bracket.

    Raises:
        OutOfMonotoneRange: ``tau_measured`` is not attained on the bracket.
    """
    sideband = Sideband(sideband)

    def tau(f):
        return delay_at_force(params, f, sideband, branch=branch)

    half = abs(f_guess) * rel_halfwidth
    for _ in range(8):
        grid = np.linspace(f_guess - half, f_guess + half, 21)
        values = np.array([tau(f) for f in grid])
        steps = np.diff(values)
        if np.all(steps > 0) or np.all(steps < 0):
            break
        half /= 2.0
    else:
        raise OutOfMonotoneRange(tau_measured, (float(values.min()), float(values.max())))
    lo, hi = grid[0], grid[-1]
    g_lo, g_hi = values[0] - tau_measured, values[-1] - tau_measured
    if g_lo == 0.0:
        return float(lo)
    if g_hi == 0.0:
        return float(hi)
    if g_lo * g_hi > 0:
        raise OutOfMonotoneRange(tau_measured, (float(values.min()), float(values.max())))

    # start from the tabulated point nearest the target
    i = int(np.argmin(np.abs(values - tau_measured)))
    f = float(grid[i])
    g = values[i] - tau_measured
    slope_window = max(1e-5, rel_halfwidth / 50.0)
    for _ in range(maxiter):
        if g == 0.0:
            return f
        if g * g_lo < 0:
            hi, g_hi = f, g
        else:
            lo, g_lo = f, g
        slope = delay_slope(params, sideband, f, slope_window, n_points=5, branch=branch).slope
        step = g / slope if slope != 0.0 else math.inf
        f_new = f - step
        if not (min(lo, hi) < f_new < max(lo, hi)):
            f_new = 0.5 * (lo + hi)
        if abs(f_new - f) <= rtol * abs(f):
            return float(f_new)
        f = f_new
        g = tau(f) - tau_measured
    return float(f)
