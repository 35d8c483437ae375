"""Shock-free 1D Lagrangian gas dynamics over piecewise-constant entropy."""

__version__ = "0.1.0"

from .gas import DomainError, GasModel, ThermoState, derived, make_gas, state_from_physical, to_physical, unit_gas
from .waves import contact_apply, contact_rs_map, hugoniot_f, hugoniot_g_h, shock_connect, simple_wave_connect

__all__ = [
    "DomainError", "GasModel", "ThermoState", "derived", "make_gas", "state_from_physical",
    "to_physical", "unit_gas", "contact_apply", "contact_rs_map", "hugoniot_f",
    "hugoniot_g_h", "shock_connect", "simple_wave_connect", "__version__",
]
