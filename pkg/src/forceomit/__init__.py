"""Force-controlled optomechanically induced transparency: simulator and calibration toolkit."""

from .errors import ForceOmitError
from .params import CONSTANTS, DerivedParams, SystemParams, baseline_params, derive
from .response import DelayMethod, DelayResult, Sideband, eps_T_full, group_delay
from .steady import ContinuationFromZeroPump, IndexSelect, SteadyState, UniqueReal, solve_steady_state
from .sweep import Axis, SweepTable, calibrate_force, delay_slope, invert_force_from_delay, sideband_forces, sweep

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "Axis",
    "ContinuationFromZeroPump",
    "DelayMethod",
    "DelayResult",
    "DerivedParams",
    "ForceOmitError",
    "IndexSelect",
    "Sideband",
    "SteadyState",
    "SweepTable",
    "SystemParams",
    "UniqueReal",
    "baseline_params",
    "calibrate_force",
    "delay_slope",
    "derive",
    "eps_T_full",
    "group_delay",
    "invert_force_from_delay",
    "sideband_forces",
    "solve_steady_state",
    "sweep",
]
