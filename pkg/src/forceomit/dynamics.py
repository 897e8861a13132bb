"""Time-domain integration of the mean-value equations (probe off).

This is the independent check on the cubic steady-state solver: the three
coupled equations for q, p and c are integrated with an adaptive explicit
8th-order Dormand-Prince scheme until the motion has settled.

State variables are scaled to O(1) before integration:

    u = chi q / (hbar omega_m),   v = chi p / (hbar m omega_m**2),
    c = c_unit (a + i b),          time in units of 1/omega_m.

The DOP853 tableau is taken from scipy; the stepping loop is compiled with
numba because settling at the physical mechanical damping takes ~1e6 steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy.integrate import DOP853

from .errors import NonConvergence
from .params import CONSTANTS, SystemParams, derive
from .steady import SteadyState, state_from_q0

_A = np.ascontiguousarray(DOP853.A, dtype=np.float64)
_B = np.ascontiguousarray(DOP853.B, dtype=np.float64)
_C = np.ascontiguousarray(DOP853.C, dtype=np.float64)
_E3 = np.ascontiguousarray(DOP853.E3, dtype=np.float64)
_E5 = np.ascontiguousarray(DOP853.E5, dtype=np.float64)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


@numba.njit(cache=True)
def _rhs(y, coef, out):
    # coef = (k, d, u_f, g_rp, gamma, e)
    u, v, a, b = y[0], y[1], y[2], y[3]
    k, d, u_f, g_rp, gamma, e = coef[0], coef[1], coef[2], coef[3], coef[4], coef[5]
    det = d - u
    out[0] = v
    out[1] = -u + g_rp * (a * a + b * b) + u_f - gamma * v
    out[2] = -k * a + det * b + e
    out[3] = -k * b - det * a


@numba.njit(cache=True)
def _advance(y, t, h, t_stop, coef, rtol, atol, A, B, C, E3, E5, max_steps):
    """Integrate from t to t_stop; return (y, h, n_steps, lo, hi)."""
    n = y.shape[0]
    K = np.zeros((13, n))
    tmp = np.empty(n)
    y_new = np.empty(n)
    lo = y.copy()
    hi = y.copy()
    _rhs(y, coef, K[0])
    steps = 0
    while t < t_stop:
        if steps >= max_steps:
            return y, h, -1, lo, hi
        h_use = min(h, t_stop - t)
        for s in range(1, 12):
            for i in range(n):
                acc = 0.0
                for j in range(s):
                    acc += A[s, j] * K[j, i]
                tmp[i] = y[i] + h_use * acc
            _rhs(tmp, coef, K[s])
        for i in range(n):
            acc = 0.0
            for j in range(12):
                acc += B[j] * K[j, i]
            y_new[i] = y[i] + h_use * acc
        _rhs(y_new, coef, K[12])
        err5 = 0.0
        err3 = 0.0
        for i in range(n):
            sc = atol + rtol * max(abs(y[i]), abs(y_new[i]))
            e5 = 0.0
            e3 = 0.0
            for j in range(13):
                e5 += E5[j] * K[j, i]
                e3 += E3[j] * K[j, i]
            err5 += (e5 / sc) ** 2
            err3 += (e3 / sc) ** 2
        if err5 == 0.0 and err3 == 0.0:
            err = 0.0
        else:
            err = h_use * err5 / math.sqrt((err5 + 0.01 * err3) * n)
        if err < 1.0:
            t += h_use
            for i in range(n):
                y[i] = y_new[i]
                K[0, i] = K[12, i]
                if y[i] < lo[i]:
                    lo[i] = y[i]
                if y[i] > hi[i]:
                    hi[i] = y[i]
            steps += 1
            if err == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = min(_MAX_FACTOR, _SAFETY * err ** (-1.0 / 8.0))
            # a step clipped to hit t_stop must not shrink the next one
            if h_use == h:
                h = h_use * factor
            else:
                h = max(h, h_use * factor)
        else:
            h = h_use * max(_MIN_FACTOR, _SAFETY * err ** (-1.0 / 8.0))
    return y, h, steps, lo, hi


def _scaled_coefficients(params: SystemParams, auxiliary_damping: float = 0.0):
    """RHS coefficients in units of omega_m, plus the (q, p, c) unit scales."""
    derived = derive(params)
    hbar = CONSTANTS.hbar
    wm = params.omega_m
    m = params.mass
    chi = derived.chi
    q_unit = hbar * wm / chi
    p_unit = q_unit * m * wm
    c_unit = derived.eps_d / params.kappa if derived.eps_d > 0 else 1.0
    coef = np.array(
        [
            params.kappa / wm,
            params.delta_c / wm,
            params.force / (m * wm**2) / q_unit,
            chi * c_unit**2 / (m * wm**2) / q_unit,
            (params.gamma_m + auxiliary_damping) / wm,
            derived.eps_d / (c_unit * wm),
        ]
    )
    return coef, q_unit, p_unit, c_unit


@dataclass(frozen=True)
class IntegrationReport:
    """Bookkeeping from a settled integration."""

    state: SteadyState
    t_settle: float
    periods: int
    steps: int
    spread: float


def integrate_mean_dynamics(
    params: SystemParams,
    initial=None,
    t_end: float = 0.5,
    tol: float = 1e-8,
    *,
    rtol: float = 1e-10,
    auxiliary_damping: float = 0.0,
    max_steps_per_period: int = 100_000,
    report: bool = False,
):
    """Integrate the mean-value equations until the fixed point is reached.

    The motion counts as settled once the peak-to-peak spread of the scaled
    displacement and of the cavity amplitude over one mechanical period,
    relative to their magnitudes, is below ``tol``. The returned fixed point
    is the centre of that last period's excursion.

    Args:
        params: system parameters (the probe is off).
        initial: ``(q, p, c)`` in SI; defaults to the undriven equilibrium
            ``(f/(m omega_m**2), 0, 0)``.
        t_end: give up after this much simulated time (s).
        tol: relative settling threshold per mechanical period.
        rtol: integrator relative tolerance.
        auxiliary_damping: extra momentum damping (rad/s) added to gamma_m.
            Fixed points do not depend on the damping rate, so this only
            shortens the transient or stabilises a fixed point that is
            unstable under the physical damping.
        report: also return an ``IntegrationReport``.

    Raises:
        NonConvergence: ``t_end`` reached before settling.
    """
    wm = params.omega_m
    m = params.mass
    coef, q_unit, p_unit, c_unit = _scaled_coefficients(params, auxiliary_damping)
    if initial is None:
        initial = (params.force / (m * wm**2), 0.0, 0.0)
    q_i, p_i, c_i = initial
    c_i = complex(c_i)
    y = np.array([q_i / q_unit, p_i / p_unit, c_i.real / c_unit, c_i.imag / c_unit], dtype=np.float64)
    atol = 1e-14 * max(1.0, float(np.max(np.abs(y))), abs(coef[2]), coef[5] / coef[0])
    period = 2.0 * math.pi
    tau_end = t_end * wm
    t = 0.0
    h = 1e-3
    total = 0
    periods = 0
    spread = math.inf
    while t < tau_end:
        y, h, steps, lo, hi = _advance(
            y, t, h, t + period, coef, rtol, atol, _A, _B, _C, _E3, _E5, max_steps_per_period
        )
        if steps < 0:
            raise NonConvergence("step budget per period exhausted", last_state=y.copy())
        t += period
        total += steps
        periods += 1
        centre = 0.5 * (lo + hi)
        width = hi - lo
        # floors keep the criterion meaningful when the fixed point is at the origin
        u_scale = max(abs(centre[0]), 1e-3)
        c_scale = max(math.hypot(centre[2], centre[3]), 1e-3)
        spread_u = max(width[0], width[1]) / u_scale
        spread_c = max(width[2], width[3]) / c_scale
        spread = max(spread_u, spread_c)
        if spread < tol:
            q0 = centre[0] * q_unit
            state = state_from_q0(params, q0)
            if report:
                return state, IntegrationReport(state, t / wm, periods, total, spread)
            return state
    last = (y[0] * q_unit, y[1] * p_unit, complex(y[2], y[3]) * c_unit)
    raise NonConvergence(
        f"no settling within t_end={t_end:g} s (relative spread {spread:.3e} > {tol:.1e})",
        last_state=last,
        residual=spread,
    )


def integrate_trajectory(params: SystemParams, initial, t_eval, *, rtol: float = 1e-10):
    """Sample the scaled-free SI trajectory ``(q, p, c)`` at the given times (s)."""
    wm = params.omega_m
    coef, q_unit, p_unit, c_unit = _scaled_coefficients(params)
    q_i, p_i, c_i = initial
    c_i = complex(c_i)
    y = np.array([q_i / q_unit, p_i / p_unit, c_i.real / c_unit, c_i.imag / c_unit], dtype=np.float64)
    atol = 1e-14 * max(1.0, float(np.max(np.abs(y))))
    out = np.empty((len(t_eval), 4))
    t = 0.0
    h = 1e-3
    for i, ts in enumerate(np.asarray(t_eval, dtype=float) * wm):
        if ts > t:
            y, h, steps, _, _ = _advance(y, t, h, ts, coef, rtol, atol, _A, _B, _C, _E3, _E5, 10_000_000)
            if steps < 0:
                raise NonConvergence("step budget exhausted")
            t = ts
        out[i] = y
    return out[:, 0] * q_unit, out[:, 1] * p_unit, (out[:, 2] + 1j * out[:, 3]) * c_unit
