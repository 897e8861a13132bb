"""Physical constants, system parameters and derived quantities.

All frequencies are angular (rad/s) and all other quantities are SI. Unit
conversion from the human-facing config units happens in ``forceomit.config``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields
from decimal import Context, Decimal

from .errors import ParameterError


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34  # J s
    c_light: float = 2.99792458e8  # m / s


CONSTANTS = PhysicalConstants()

_POSITIVE = ("wavelength", "pump_power", "probe_power", "cavity_length", "kappa", "mass", "omega_m")


@dataclass(frozen=True)
class SystemParams:
    """Experimental parameter set for a single-sided optomechanical cavity.

    Attributes:
        wavelength: pump wavelength (m).
        pump_power: pump power P_d (W).
        probe_power: probe power P_p (W).
        cavity_length: cavity length L (m).
        kappa: cavity amplitude decay rate (rad/s).
        mass: effective mirror mass (kg).
        omega_m: mechanical angular frequency (rad/s).
        gamma_m: mechanical damping rate (rad/s).
        delta_c: bare cavity-pump detuning omega_c - omega_d (rad/s).
        force: constant external force on the mirror (N).
    """

    wavelength: float
    pump_power: float
    probe_power: float
    cavity_length: float
    kappa: float
    mass: float
    omega_m: float
    gamma_m: float
    delta_c: float
    force: float = 0.0

    def validate(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ParameterError(f.name, f"must be a finite real number, got {value!r}")
        for name in _POSITIVE:
            # zero pump/probe power is a legitimate limiting case
            if name in ("pump_power", "probe_power"):
                if getattr(self, name) < 0:
                    raise ParameterError(name, "must be >= 0")
            elif getattr(self, name) <= 0:
                raise ParameterError(name, "must be > 0")
        if self.gamma_m < 0:
            raise ParameterError("gamma_m", "must be >= 0")
        if self.probe_power > self.pump_power:
            warnings.warn(
                "probe_power exceeds pump_power; linear response in the probe is assumed anyway",
                RuntimeWarning,
                stacklevel=3,
            )

    def replace(self, **changes) -> SystemParams:
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class DerivedParams:
    """Quantities fixed by a ``SystemParams`` instance.

    ``eps_p`` is the probe amplitude at zero probe detuning; use
    :meth:`eps_p_at` for a given detuning.
    """

    omega_d: float
    omega_c: float
    chi: float
    eps_d: float
    eps_p: float
    kappa: float
    probe_power: float

    def eps_p_at(self, delta: float) -> float:
        omega_p = self.omega_d + delta
        return math.sqrt(2.0 * self.kappa * self.probe_power / (CONSTANTS.hbar * omega_p))


def derive(params: SystemParams) -> DerivedParams:
    params.validate()
    hbar = CONSTANTS.hbar
    omega_d = 2.0 * math.pi * CONSTANTS.c_light / params.wavelength
    omega_c = omega_d + params.delta_c
    if omega_c <= 0:
        raise ParameterError("delta_c", "cavity frequency omega_d + delta_c must be positive")
    return DerivedParams(
        omega_d=omega_d,
        omega_c=omega_c,
        chi=hbar * omega_c / params.cavity_length,
        eps_d=math.sqrt(2.0 * params.kappa * params.pump_power / (hbar * omega_d)),
        eps_p=math.sqrt(2.0 * params.kappa * params.probe_power / (hbar * omega_d)),
        kappa=params.kappa,
        probe_power=params.probe_power,
    )


DECIMAL_CONTEXT = Context(prec=60)
TWO_PI_DECIMAL = Decimal("6.28318530717958647692528676655900576839433879875021164194988918")


def angular(freq) -> float:
    """``2 pi * freq`` rounded once to the nearest double.

    ``freq`` may be a float, int, string or Decimal (Hz).
    """
    return float(DECIMAL_CONTEXT.multiply(TWO_PI_DECIMAL, Decimal(freq)))


BASELINE_PROBE_POWER = 1e-9  # W; placeholder, the response is independent of it


def baseline_params() -> SystemParams:
    """Parameter set of the reference force-induced transparency study, with f = 0."""
    omega_m = angular(947000)
    return SystemParams(
        wavelength=1.064e-6,
        pump_power=2e-4,
        probe_power=BASELINE_PROBE_POWER,
        cavity_length=0.025,
        kappa=angular(215000),
        mass=1.45e-10,
        omega_m=omega_m,
        gamma_m=angular(141),
        delta_c=-10.0 * omega_m,
        force=0.0,
    )
