"""Linear response of the cavity to a weak probe.

Every function takes the probe detuning ``delta = omega_p - omega_d`` in rad/s
and accepts scalars or numpy arrays. Conventions follow the single-sided
input-output relation ``eps_out = eps_in - 2 kappa <c>``, so the quadrature
``eps_T = 2 kappa c_plus`` runs from 0 to 2 and the probe transmission is
``1 - eps_T``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DegenerateDenominator, SingularSystem, ZeroTransmission
from .params import CONSTANTS, DerivedParams, SystemParams, derive
from .steady import SteadyState


class Sideband(enum.Enum):
    RED = "red"
    BLUE = "blue"

    def detuning(self, omega_m: float) -> float:
        return omega_m if self is Sideband.RED else -omega_m


class DelayMethod(enum.Enum):
    ANALYTIC = "analytic"
    FINITE_DIFFERENCE = "finite_difference"


@dataclass(frozen=True)
class ResponsePoint:
    delta: float
    c_plus: complex
    c_minus: complex
    eps_T: complex
    transmission: complex
    phase: float
    eps_T_rwa: complex
    eps_T_antirwa: complex


@dataclass(frozen=True)
class DelayResult:
    """Group delay at a two-photon resonance.

    ``tau_rwa_approx`` and ``tau_antirwa_approx`` are the delays obtained from
    the red- and blue-sideband approximate quadratures at the same detuning.
    """

    tau: float
    sideband: Sideband
    method: DelayMethod
    delta: float
    tau_rwa_approx: float
    tau_antirwa_approx: float


def _scalar_or_array(out):
    return out if np.ndim(out) else complex(out)


def _check_denominator(den, scale):
    if np.any(np.abs(den) <= 1e-300 * scale):
        raise DegenerateDenominator("response denominator vanishes; parameters sit on a critical point")


def c_plus_closed_form(state: SteadyState, params: SystemParams, delta):
    """Probe sideband amplitude from the eliminated sideband equations."""
    delta = np.asarray(delta, dtype=float)
    kappa, wm, gm = params.kappa, params.omega_m, params.gamma_m
    D, beta = state.delta_eff, state.beta
    X = delta**2 - wm**2 + 1j * gm * delta
    num = X * (kappa - 1j * (D + delta)) - 2j * wm * beta
    den = X * (D**2 + (kappa - 1j * delta) ** 2) + 4.0 * D * wm * beta
    _check_denominator(den, wm**4)
    out = num / den
    return _scalar_or_array(out)


def eps_T_full(state: SteadyState, params: SystemParams, delta):
    """Quadrature ``2 kappa c_plus`` in nested continued-fraction form."""
    delta = np.asarray(delta, dtype=float)
    kappa, wm, gm = params.kappa, params.omega_m, params.gamma_m
    D, beta = state.delta_eff, state.beta
    X = delta**2 - wm**2 + 1j * gm * delta
    inner = kappa - 1j * (delta + D)
    _check_denominator(inner, kappa)
    mid = X - 2j * wm * beta / inner
    _check_denominator(mid, wm**2)
    outer = (kappa - 1j * (delta - D)) + 2j * wm * beta / mid
    _check_denominator(outer, kappa)
    out = 2.0 * kappa / outer
    return _scalar_or_array(out)


def eps_T_rwa(state: SteadyState, params: SystemParams, delta):
    """Red-sideband (rotating-wave) approximation of the quadrature."""
    delta = np.asarray(delta, dtype=float)
    kappa = params.kappa
    mech = params.gamma_m / 2.0 - 1j * (delta - params.omega_m)
    out = 2.0 * kappa / ((kappa - 1j * (delta - state.delta_eff)) + state.beta / mech)
    return _scalar_or_array(out)


def eps_T_antirwa(state: SteadyState, params: SystemParams, delta):
    """Blue-sideband approximation; differs from the red one by the sign of the mechanical term."""
    delta = np.asarray(delta, dtype=float)
    kappa = params.kappa
    mech = params.gamma_m / 2.0 - 1j * (delta + params.omega_m)
    out = 2.0 * kappa / ((kappa - 1j * (delta - state.delta_eff)) - state.beta / mech)
    return _scalar_or_array(out)


def transmission(eps_T):
    return 1.0 - eps_T


def phase(transmission) -> float:
    """Principal argument in (-pi, pi]."""
    eps = np.asarray(transmission, dtype=complex)
    if np.any(np.abs(eps) < 1e-300):
        raise ZeroTransmission("probe transmission vanishes; phase undefined")
    out = np.angle(eps)
    out = np.where(out <= -np.pi, np.pi, out)
    return out if np.ndim(out) else float(out)


def solve_sideband_linear_system(
    state: SteadyState, params: SystemParams, delta: float, derived: DerivedParams | None = None
):
    """Solve the first-order sideband equations directly.

    The unknowns are ``(q_plus, c_plus, conj(c_minus))``; with ``q_minus =
    conj(q_plus)`` for a real displacement, the conjugated idler equation makes
    the system complex-linear. Returns ``(q_plus, c_plus, c_minus)`` with
    ``q_plus`` in m per unit probe amplitude.

    Raises:
        SingularSystem: condition number of the equilibrated matrix above 1e14.
    """
    if derived is None:
        derived = derive(params)
    hbar = CONSTANTS.hbar
    chi = derived.chi
    kappa, wm, gm = params.kappa, params.omega_m, params.gamma_m
    D = state.delta_eff
    c0 = state.c0
    coupling = chi**2 / (params.mass * hbar * wm)
    # w = chi q_plus / hbar
    A = np.array(
        [
            [(wm**2 - delta**2 - 1j * gm * delta) / wm, -coupling * np.conj(c0), -coupling * c0],
            [-1j * c0, kappa + 1j * (D - delta), 0.0],
            [1j * np.conj(c0), 0.0, kappa - 1j * (D + delta)],
        ],
        dtype=complex,
    )
    rhs = np.array([0.0, 1.0, 0.0], dtype=complex)
    # row then column equilibration
    r = np.max(np.abs(A), axis=1)
    r[r == 0.0] = 1.0
    A = A / r[:, None]
    rhs = rhs / r
    s = np.max(np.abs(A), axis=0)
    s[s == 0.0] = 1.0
    A = A / s[None, :]
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularSystem(float(cond))
    w, c_plus, c_minus_conj = np.linalg.solve(A, rhs) / s
    return complex(w * hbar / chi), complex(c_plus), complex(np.conj(c_minus_conj))


def assemble_output_field(state: SteadyState, params: SystemParams, delta: float, derived: DerivedParams | None = None):
    """Fourier components of the output field at the pump, probe and idler frequencies."""
    if derived is None:
        derived = derive(params)
    kappa = params.kappa
    eps_p = derived.eps_p_at(delta)
    _, c_plus, c_minus = solve_sideband_linear_system(state, params, delta, derived)
    dc = derived.eps_d - 2.0 * kappa * state.c0
    at_probe = (1.0 - 2.0 * kappa * c_plus) * eps_p
    at_idler = -2.0 * kappa * c_minus * np.conj(eps_p)
    return complex(dc), complex(at_probe), complex(at_idler)


def response_point(state: SteadyState, params: SystemParams, delta: float, derived: DerivedParams | None = None) -> ResponsePoint:
    _, c_plus, c_minus = solve_sideband_linear_system(state, params, delta, derived)
    eT = eps_T_full(state, params, delta)
    eps = transmission(eT)
    return ResponsePoint(
        delta=float(delta),
        c_plus=c_plus,
        c_minus=c_minus,
        eps_T=eT,
        transmission=eps,
        phase=phase(eps),
        eps_T_rwa=eps_T_rwa(state, params, delta),
        eps_T_antirwa=eps_T_antirwa(state, params, delta),
    )


# --- group delay -----------------------------------------------------------


def sideband_polynomials(state: SteadyState, params: SystemParams):
    """Numerator and denominator of ``c_plus`` as polynomials in ``x = delta/omega_m``.

    Coefficients are in ascending order; ``c_plus(delta) = N(x)/D(x) / omega_m``.
    """
    wm = params.omega_m
    k = params.kappa / wm
    g = params.gamma_m / wm
    d = state.delta_eff / wm
    b = state.beta / wm**2
    X = np.array([-1.0, 1j * g, 1.0])
    num = P.polyadd(P.polymul(X, [k - 1j * d, -1j]), [-2j * b])
    den = P.polyadd(P.polymul(X, [d**2 + k**2, -2j * k, -1.0]), [4.0 * d * b])
    return num, den


def _tau_analytic(state, params, delta):
    wm = params.omega_m
    num, den = sideband_polynomials(state, params)
    x = delta / wm
    N, Np = P.polyval(x, num), P.polyval(x, P.polyder(num))
    Dn, Dp = P.polyval(x, den), P.polyval(x, P.polyder(den))
    if abs(Dn) == 0.0:
        raise DegenerateDenominator("sideband denominator vanishes at the evaluation point")
    k = params.kappa / wm
    eps = 1.0 - 2.0 * k * N / Dn
    if abs(eps) < 1e-300:
        raise ZeroTransmission("probe transmission vanishes at the evaluation point")
    # d eps / dx by the quotient rule; x = delta / omega_m
    deps = -2.0 * k * (Np * Dn - N * Dp) / Dn**2
    return float(np.imag(deps / eps)) / wm


def _phase_step(func, state, params, delta, h):
    hi = transmission(func(state, params, delta + h))
    lo = transmission(func(state, params, delta - h))
    if abs(hi) < 1e-300 or abs(lo) < 1e-300:
        raise ZeroTransmission("probe transmission vanishes near the evaluation point")
    return np.angle(hi / lo) / (2.0 * h)


def _tau_finite_difference(state, params, delta, h0=None):
    if h0 is None:
        h0 = 1e-6 * params.omega_m
    coarse = _phase_step(eps_T_full, state, params, delta, h0)
    fine = _phase_step(eps_T_full, state, params, delta, h0 / 2.0)
    return float(fine + (fine - coarse) / 3.0)


def _tau_approx(state, params, delta, sign):
    kappa, wm = params.kappa, params.omega_m
    beta = state.beta
    mech = params.gamma_m / 2.0 - 1j * (delta - sign * wm)
    G = (kappa - 1j * (delta - state.delta_eff)) + sign * beta / mech
    dG = -1j + sign * 1j * beta / mech**2
    eT = 2.0 * kappa / G
    eps = 1.0 - eT
    if abs(eps) < 1e-300:
        raise ZeroTransmission("approximate transmission vanishes at the evaluation point")
    deps = 2.0 * kappa * dG / G**2
    return float(np.imag(deps / eps))


def tau_rwa(state, params, delta):
    return _tau_approx(state, params, delta, +1.0)


def tau_antirwa(state, params, delta):
    return _tau_approx(state, params, delta, -1.0)


def group_delay(
    state: SteadyState,
    params: SystemParams,
    sideband: Sideband | str = Sideband.RED,
    method: DelayMethod | str = DelayMethod.ANALYTIC,
    delta: float | None = None,
) -> DelayResult:
    """Group delay of the transmitted probe at a sideband.

    Args:
        sideband: evaluation at delta = +omega_m (red) or -omega_m (blue).
        method: closed-form derivative or Richardson-extrapolated central
            difference of the phase.
        delta: optional override of the evaluation detuning (rad/s).
    """
    sideband = Sideband(sideband)
    method = DelayMethod(method)
    if delta is None:
        delta = sideband.detuning(params.omega_m)
    if method is DelayMethod.ANALYTIC:
        tau = _tau_analytic(state, params, delta)
    else:
        tau = _tau_finite_difference(state, params, delta)
    return DelayResult(
        tau=tau,
        sideband=sideband,
        method=method,
        delta=float(delta),
        tau_rwa_approx=tau_rwa(state, params, delta),
        tau_antirwa_approx=tau_antirwa(state, params, delta),
    )
