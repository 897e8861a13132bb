"""Flat ``key = value`` run configuration.

Quantities are written in the units of the experimental literature (kHz/2pi,
ng, mm, mW) and converted to SI here, and only here. Values are parsed as
decimals before scaling so that e.g. ``pump_power_mW = 0.2`` gives exactly
the double nearest 2e-4 W.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Context, Decimal, InvalidOperation
from pathlib import Path

from .errors import MissingKey, UnknownKey, UnparsableValue
from .params import BASELINE_PROBE_POWER, DECIMAL_CONTEXT, TWO_PI_DECIMAL, SystemParams
from .steady import ContinuationFromZeroPump, branch_policy_name, parse_branch_policy

CTX = DECIMAL_CONTEXT


# Each key maps a config decimal to SI with a single rounding, so every double
# is reachable and emit/parse round-trips exactly.


def _scaled(decimal_factor: str):
    factor = Decimal(decimal_factor)
    return (
        lambda d, omega_m=None: float(CTX.multiply(d, factor)),
        lambda x, omega_m=None: CTX.divide(Decimal(x), factor),
    )


def _angular(decimal_factor: str):
    factor = CTX.multiply(Decimal(decimal_factor), TWO_PI_DECIMAL)
    return (
        lambda d, omega_m=None: float(CTX.multiply(d, factor)),
        lambda x, omega_m=None: CTX.divide(Decimal(x), factor),
    )


# config key -> (SystemParams field, to_si, from_si)
SYSTEM_KEYS = {
    "wavelength_nm": ("wavelength", *_scaled("1e-9")),
    "pump_power_mW": ("pump_power", *_scaled("1e-3")),
    "probe_power_nW": ("probe_power", *_scaled("1e-9")),
    "cavity_length_mm": ("cavity_length", *_scaled("1e-3")),
    "kappa_over_2pi_kHz": ("kappa", *_angular("1e3")),
    "mass_ng": ("mass", *_scaled("1e-12")),
    "omega_m_over_2pi_kHz": ("omega_m", *_angular("1e3")),
    "gamma_m_over_2pi_Hz": ("gamma_m", *_angular("1")),
    "delta_c_in_omega_m": (
        "delta_c",
        lambda d, omega_m: float(CTX.multiply(d, Decimal(omega_m))),
        lambda x, omega_m: CTX.divide(Decimal(x), Decimal(omega_m)),
    ),
    "force_N": ("force", *_scaled("1")),
}

OPTIONAL_DEFAULTS = {
    "probe_power_nW": Decimal(repr(BASELINE_PROBE_POWER * 1e9)),
}

RUN_KEYS = ("branch_policy", "output_dir", "emit_svg")


@dataclass(frozen=True)
class RunConfig:
    system: SystemParams
    branch_policy: object = field(default_factory=ContinuationFromZeroPump)
    output_dir: Path = Path("out")
    emit_svg: bool = False


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text.

    Raises:
        MissingKey, UnknownKey, UnparsableValue: naming the key (and line).
    """
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise UnparsableValue(stripped, stripped, lineno)
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in SYSTEM_KEYS and key not in RUN_KEYS:
            raise UnknownKey(key, lineno)
        raw[key] = (value, lineno)

    for key in SYSTEM_KEYS:
        if key not in raw and key not in OPTIONAL_DEFAULTS:
            raise MissingKey(key)

    decimals: dict[str, Decimal] = {}
    for key in SYSTEM_KEYS:
        if key not in raw:
            decimals[key] = OPTIONAL_DEFAULTS[key]
            continue
        value, lineno = raw[key]
        try:
            d = Decimal(value)
        except InvalidOperation:
            raise UnparsableValue(key, value, lineno) from None
        if not d.is_finite():
            raise UnparsableValue(key, value, lineno)
        decimals[key] = d

    omega_m = SYSTEM_KEYS["omega_m_over_2pi_kHz"][1](decimals["omega_m_over_2pi_kHz"])
    kwargs = {name: to_si(decimals[key], omega_m) for key, (name, to_si, _) in SYSTEM_KEYS.items()}
    system = SystemParams(**kwargs)
    system.validate()

    run = {}
    if "branch_policy" in raw:
        value, lineno = raw["branch_policy"]
        try:
            run["branch_policy"] = parse_branch_policy(value)
        except ValueError:
            raise UnparsableValue("branch_policy", value, lineno) from None
    if "output_dir" in raw:
        run["output_dir"] = Path(raw["output_dir"][0])
    if "emit_svg" in raw:
        value, lineno = raw["emit_svg"]
        try:
            run["emit_svg"] = _parse_bool(value)
        except ValueError:
            raise UnparsableValue("emit_svg", value, lineno) from None
    return RunConfig(system=system, **run)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def _exact_decimal(x: float, key: str, omega_m: float) -> str:
    """Shortest decimal for ``x`` in config units that converts back to ``x`` exactly."""
    _, to_si, from_si = SYSTEM_KEYS[key]
    exact = from_si(x, omega_m)
    for digits in range(1, 41):
        d = Context(prec=digits).plus(exact)
        if to_si(d, omega_m) == x:
            break
    d = d.normalize()
    return format(d, "f") if -7 < d.adjusted() < 16 else str(d)


def emit_config(config: RunConfig) -> str:
    s = config.system
    lines = []
    for key, (name, _, _) in SYSTEM_KEYS.items():
        value = _exact_decimal(getattr(s, name), key, s.omega_m)
        lines.append(f"{key} = {value}")
    lines.append(f"branch_policy = {branch_policy_name(config.branch_policy)}")
    lines.append(f"output_dir = {config.output_dir}")
    lines.append(f"emit_svg = {'true' if config.emit_svg else 'false'}")
    return "\n".join(lines) + "\n"


BASELINE_CONFIG_TEXT = """\
# reference parameter set; the figure presets derive their forces from it
wavelength_nm = 1064
pump_power_mW = 0.2
cavity_length_mm = 25
kappa_over_2pi_kHz = 215
mass_ng = 145
omega_m_over_2pi_kHz = 947
gamma_m_over_2pi_Hz = 141
delta_c_in_omega_m = -10
force_N = 0
"""
