"""Mean-field steady state of the force-driven optomechanical cavity.

The static mirror displacement obeys a cubic equation. Internally the cubic is
written for the dimensionless detuning shift ``u = chi*q/(hbar*omega_m)``,
which keeps all coefficients O(1)-O(100) instead of spanning ~40 decades in SI:

    (u - u_f) * (k**2 + (d - u)**2) = u_rp

with ``k = kappa/omega_m``, ``d = delta_c/omega_m``, ``u_f`` the force-induced
shift and ``u_rp`` the radiation-pressure term.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import MultistableAmbiguity, NonConvergence
from .params import CONSTANTS, DerivedParams, SystemParams, derive


class UnstableBranchWarning(RuntimeWarning):
    """The selected fixed point has a Jacobian eigenvalue with positive real part."""


@dataclass(frozen=True)
class SteadyState:
    """Operating point of the linearisation.

    Attributes:
        q0: static mirror displacement (m).
        p0: static momentum (kg m/s); always zero.
        c0: intracavity amplitude.
        delta_eff: effective detuning delta_c - chi*q0/hbar (rad/s).
        beta: coupling scale chi**2 |c0|**2 / (2 m hbar omega_m) (1/s**2).
        n_cav: intracavity photon number |c0|**2.
        stable: whether all Jacobian eigenvalues have negative real part.
    """

    q0: float
    p0: float
    c0: complex
    delta_eff: float
    beta: float
    n_cav: float
    stable: bool = True

    def with_beta(self, beta: float) -> SteadyState:
        """Copy with the coupling scale overridden (decoupled-mirror checks)."""
        from dataclasses import replace

        return replace(self, beta=beta)


@dataclass(frozen=True)
class CubicCoefficients:
    """SI coefficients of a3*q**3 + a2*q**2 + a1*q + a0 = 0."""

    a3: float
    a2: float
    a1: float
    a0: float

    def evaluate(self, q):
        return ((self.a3 * q + self.a2) * q + self.a1) * q + self.a0

    def normalized_residual(self, q: float) -> float:
        terms = (self.a3 * q**3, self.a2 * q**2, self.a1 * q, self.a0)
        scale = max(abs(t) for t in terms)
        if scale == 0.0:
            return 0.0
        return abs(sum(terms)) / scale


# Branch selection policies


@dataclass(frozen=True)
class UniqueReal:
    """Accept only a cubic with a single real root."""


@dataclass(frozen=True)
class ContinuationFromZeroPump:
    """Ramp the pump from zero and follow the root connected to q0 = f/(m omega_m**2)."""

    steps: int = 16
    start_fraction: float = 1e-12

    def __post_init__(self):
        if self.steps < 8:
            raise ValueError("continuation needs at least 8 steps")


@dataclass(frozen=True)
class IndexSelect:
    """Pick the k-th real root in ascending order."""

    k: int


BranchPolicy = UniqueReal | ContinuationFromZeroPump | IndexSelect


def parse_branch_policy(text: str):
    text = text.strip().lower()
    if text in ("unique", "uniquereal", "unique_real"):
        return UniqueReal()
    if text in ("continuation", "continuationfromzeropump", "continuation_from_zero_pump"):
        return ContinuationFromZeroPump()
    if text.startswith("index"):
        return IndexSelect(int(text.split(":", 1)[1] if ":" in text else text[5:].strip("()")))
    raise ValueError(f"unknown branch policy {text!r}")


def branch_policy_name(policy) -> str:
    if isinstance(policy, UniqueReal):
        return "unique"
    if isinstance(policy, IndexSelect):
        return f"index:{policy.k}"
    return "continuation"


def cubic_coefficients(params: SystemParams, derived: DerivedParams | None = None) -> CubicCoefficients:
    if derived is None:
        derived = derive(params)
    hbar = CONSTANTS.hbar
    chi = derived.chi
    f = params.force
    k2d2 = params.kappa**2 + params.delta_c**2
    mw2 = params.mass * params.omega_m**2
    return CubicCoefficients(
        a3=mw2 * chi**2 / hbar**2,
        a2=-(f * chi**2 / hbar**2 + 2.0 * mw2 * (chi / hbar) * params.delta_c),
        a1=mw2 * k2d2 + 2.0 * f * (chi / hbar) * params.delta_c,
        a0=-(f * k2d2 + chi * derived.eps_d**2),
    )


@dataclass(frozen=True)
class _Scaled:
    k: float
    d: float
    u_f: float
    u_rp: float
    # u = q / q_unit
    q_unit: float


def _scaled(params: SystemParams, derived: DerivedParams) -> _Scaled:
    hbar = CONSTANTS.hbar
    wm = params.omega_m
    mw2 = params.mass * wm**2
    chi = derived.chi
    q_unit = hbar * wm / chi
    # divide before multiplying by chi so tiny forces do not pass through subnormals
    return _Scaled(
        k=params.kappa / wm,
        d=params.delta_c / wm,
        u_f=params.force / mw2 / q_unit,
        u_rp=chi * derived.eps_d**2 / mw2 / q_unit / wm**2,
        q_unit=q_unit,
    )


def _monic(s: _Scaled, u_rp: float):
    k2d2 = s.k**2 + s.d**2
    return np.array([1.0, -(s.u_f + 2.0 * s.d), k2d2 + 2.0 * s.u_f * s.d, -(s.u_f * k2d2 + u_rp)])


def _polish(coeffs, u: float, iterations: int = 8) -> float:
    c3, c2, c1, c0 = coeffs
    for _ in range(iterations):
        val = ((c3 * u + c2) * u + c1) * u + c0
        der = (3.0 * c3 * u + 2.0 * c2) * u + c1
        if der == 0.0:
            break
        step = val / der
        u -= step
        # relative test: roots far below 1 in scaled units still get refined
        if abs(step) <= 4e-16 * abs(u):
            break
    return u


def _real_roots(coeffs) -> list[float]:
    roots = np.roots(coeffs)
    scale = max(1.0, float(np.max(np.abs(roots))))
    real = sorted(_polish(coeffs, r.real) for r in roots if abs(r.imag) <= 1e-7 * scale)
    if not real:
        # a real cubic always has a real root; fall back on the least-imaginary one
        real = [_polish(coeffs, roots[np.argmin(np.abs(roots.imag))].real)]
    distinct: list[float] = []
    for r in real:
        if not distinct or abs(r - distinct[-1]) > 1e-9 * max(abs(r), 1.0):
            distinct.append(r)
    for r in distinct:
        if not math.isfinite(r):
            raise NonConvergence(f"non-finite cubic root {r!r}")
    return distinct


def _nearest(roots: list[float], target: float) -> float:
    return min(roots, key=lambda r: abs(r - target))


def _continuation(s: _Scaled, steps: int, start_fraction: float, seed: float | None = None) -> float:
    if s.u_rp == 0.0:
        return _nearest(_real_roots(_monic(s, 0.0)), s.u_f if seed is None else seed)
    u = s.u_f
    for frac in np.geomspace(start_fraction, 1.0, steps):
        u = _nearest(_real_roots(_monic(s, s.u_rp * frac)), u)
    return u


def jacobian(params: SystemParams, state: SteadyState, derived: DerivedParams | None = None) -> np.ndarray:
    """Real 4x4 Jacobian of the mean-value equations in (q, p, Re c, Im c)."""
    if derived is None:
        derived = derive(params)
    hbar = CONSTANTS.hbar
    chi = derived.chi
    m = params.mass
    cr, ci = state.c0.real, state.c0.imag
    D = state.delta_eff
    return np.array(
        [
            [0.0, 1.0 / m, 0.0, 0.0],
            [-m * params.omega_m**2, -params.gamma_m, 2.0 * chi * cr, 2.0 * chi * ci],
            [-chi * ci / hbar, 0.0, -params.kappa, D],
            [chi * cr / hbar, 0.0, -D, -params.kappa],
        ]
    )


def stability_eigenvalues(params: SystemParams, state: SteadyState, derived: DerivedParams | None = None) -> np.ndarray:
    if derived is None:
        derived = derive(params)
    J = jacobian(params, state, derived)
    # similarity scaling to O(1) entries; eigenvalues are unchanged
    q_unit = CONSTANTS.hbar * params.omega_m / derived.chi
    c_unit = max(abs(state.c0), 1.0)
    S = np.array([q_unit, q_unit * params.mass * params.omega_m, c_unit, c_unit])
    return np.linalg.eigvals(J * S[None, :] / S[:, None])


def state_from_q0(params: SystemParams, q0: float, derived: DerivedParams | None = None) -> SteadyState:
    """Build the full operating point from a mirror displacement."""
    if derived is None:
        derived = derive(params)
    hbar = CONSTANTS.hbar
    delta_eff = params.delta_c - derived.chi * q0 / hbar
    c0 = derived.eps_d / complex(params.kappa, delta_eff)
    n_cav = abs(c0) ** 2
    beta = derived.chi**2 * n_cav / (2.0 * params.mass * hbar * params.omega_m)
    return SteadyState(
        q0=float(q0), p0=0.0, c0=complex(c0), delta_eff=float(delta_eff), beta=float(beta), n_cav=float(n_cav)
    )


def solve_steady_state(
    params: SystemParams,
    branch=None,
    *,
    seed_q0: float | None = None,
    check_stability: bool = True,
) -> SteadyState:
    """Solve the steady-state cubic and return the selected fixed point.

    Args:
        params: system parameters, including the external force.
        branch: ``UniqueReal``, ``ContinuationFromZeroPump`` (default) or
            ``IndexSelect``.
        seed_q0: when given, skip the pump ramp and follow the real root
            nearest this displacement. Sweeps use it to continue from the
            previous point.
        check_stability: evaluate the Jacobian and warn on an unstable branch.

    Raises:
        MultistableAmbiguity: ``UniqueReal`` policy and three real roots.
    """
    if branch is None:
        branch = ContinuationFromZeroPump()
    derived = derive(params)
    s = _scaled(params, derived)
    coeffs = _monic(s, s.u_rp)
    if seed_q0 is not None:
        u = _nearest(_real_roots(coeffs), seed_q0 / s.q_unit)
    elif isinstance(branch, UniqueReal):
        roots = _real_roots(coeffs)
        if len(roots) > 1:
            raise MultistableAmbiguity([r * s.q_unit for r in roots])
        u = roots[0]
    elif isinstance(branch, IndexSelect):
        roots = _real_roots(coeffs)
        try:
            u = roots[branch.k]
        except IndexError:
            raise ValueError(f"root index {branch.k} out of range for {len(roots)} real roots") from None
    else:
        u = _continuation(s, branch.steps, branch.start_fraction)
    state = state_from_q0(params, u * s.q_unit, derived)
    if check_stability:
        eig = stability_eigenvalues(params, state, derived)
        stable = bool(np.all(eig.real < 0.0))
        if not stable:
            warnings.warn(
                f"steady state at f={params.force:.6g} N is dynamically unstable "
                f"(max Re eigenvalue {eig.real.max():.4g} 1/s)",
                UnstableBranchWarning,
                stacklevel=2,
            )
        from dataclasses import replace

        state = replace(state, stable=stable)
    return state


def steady_residual(params: SystemParams, state: SteadyState, derived: DerivedParams | None = None):
    """Normalised right-hand sides of the mean-value equations at a fixed point.

    Returns ``(r_q, r_p, r_c)``; each is zero at an exact fixed point.
    """
    if derived is None:
        derived = derive(params)
    hbar = CONSTANTS.hbar
    tiny = 1e-300
    m, wm = params.mass, params.omega_m
    q0, p0, c0 = state.q0, state.p0, state.c0
    rhs_q = p0 / m
    rhs_p = -m * wm**2 * q0 + derived.chi * abs(c0) ** 2 + params.force - params.gamma_m * p0
    rhs_c = -complex(params.kappa, params.delta_c - derived.chi * q0 / hbar) * c0 + derived.eps_d
    r_q = abs(rhs_q) / (wm * abs(q0) + tiny)
    r_p = abs(rhs_p) / (m * wm**2 * abs(q0) + abs(params.force) + tiny)
    r_c = abs(rhs_c) / (params.kappa * abs(c0) + derived.eps_d + tiny)
    return r_q, r_p, r_c
