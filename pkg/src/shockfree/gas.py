"""Polytropic gas thermodynamics in the canonical (m, z) coordinates.

For a gamma-law gas ``p = K exp(S/c_v) tau^-gamma`` we use

    c = m z^d,   p = m^2 z^(d+1) / (d+1),   tau = z^(1-d) / (d-1)

with ``d = (gamma+1)/(gamma-1)``, ``z = C_z tau^(-(gamma-1)/2)`` and
``m = C_m exp(S / 2 c_v)``.  ``m`` is called the entropy variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class DomainError(ValueError):
    """Argument outside the region where a formula is defined."""


@dataclass(frozen=True)
class GasModel:
    gamma: float
    K: float = 1.0
    c_v: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must exceed 1, got {self.gamma!r}")
        if not self.K > 0.0:
            raise DomainError(f"K must be positive, got {self.K!r}")
        if not self.c_v > 0.0:
            raise DomainError(f"c_v must be positive, got {self.c_v!r}")

    @property
    def d(self) -> float:
        return (self.gamma + 1.0) / (self.gamma - 1.0)

    @property
    def C_z(self) -> float:
        d = self.d
        return (d - 1.0) ** (1.0 / (1.0 - d))

    @property
    def C_m(self) -> float:
        return math.sqrt(self.K * self.gamma) * self.C_z ** (-self.d)


def make_gas(gamma: float, K: float = 1.0, c_v: float = 1.0) -> GasModel:
    return GasModel(float(gamma), float(K), float(c_v))


def unit_gas(gamma: float) -> GasModel:
    """Gas with K chosen so that C_m = 1 (and c_v = 1)."""
    gamma = float(gamma)
    if not gamma > 1.0:
        raise DomainError(f"gamma must exceed 1, got {gamma!r}")
    d = (gamma + 1.0) / (gamma - 1.0)
    C_z = (d - 1.0) ** (1.0 / (1.0 - d))
    return GasModel(gamma, C_z ** (2.0 * d) / gamma, 1.0)


def gas_from_d(d: float, K: float | None = None, c_v: float = 1.0) -> GasModel:
    """Gas with the given exponent d; unit normalization unless K is given."""
    gamma = (d + 1.0) / (d - 1.0)
    if K is None:
        return unit_gas(gamma)
    return make_gas(gamma, K, c_v)


@dataclass(frozen=True)
class ThermoState:
    """Point state in canonical variables: z > 0, velocity u, entropy m > 0."""

    z: float
    u: float
    m: float

    @property
    def r(self) -> float:
        return self.u - self.m * self.z

    @property
    def s(self) -> float:
        return self.u + self.m * self.z

    @classmethod
    def from_invariants(cls, r: float, s: float, m: float) -> "ThermoState":
        return cls((s - r) / (2.0 * m), 0.5 * (s + r), m)


class Derived(NamedTuple):
    tau: float
    p: float
    c: float
    r: float
    s: float


def state_from_physical(tau: float, u: float, S: float, gas: GasModel) -> ThermoState:
    if not tau > 0.0:
        raise DomainError(f"specific volume must be positive, got {tau!r}")
    z = gas.C_z * tau ** (-(gas.gamma - 1.0) / 2.0)
    m = gas.C_m * math.exp(S / (2.0 * gas.c_v))
    return ThermoState(z, u, m)


def to_physical(state: ThermoState, gas: GasModel) -> tuple[float, float, float]:
    """Inverse of :func:`state_from_physical`: returns (tau, u, S)."""
    tau = (state.z / gas.C_z) ** (-2.0 / (gas.gamma - 1.0))
    S = 2.0 * gas.c_v * math.log(state.m / gas.C_m)
    return tau, state.u, S


# Array-friendly primitives shared by the solver modules.

def pressure(z, m, d):
    return m * m * z ** (d + 1.0) / (d + 1.0)


def sound_speed(z, m, d):
    return m * z**d


def specific_volume(z, d):
    return z ** (1.0 - d) / (d - 1.0)


def derived(state: ThermoState, gas: GasModel) -> Derived:
    z, m, d = state.z, state.m, gas.d
    if not (z > 0.0 and m > 0.0):
        raise DomainError(f"need z > 0 and m > 0, got z={z!r}, m={m!r}")
    return Derived(
        tau=specific_volume(z, d),
        p=pressure(z, m, d),
        c=sound_speed(z, m, d),
        r=state.r,
        s=state.s,
    )


def pressure_of_tau(tau, m, gas: GasModel):
    """p as a function of tau at fixed m (used for the c^2 = -dp/dtau check)."""
    d = gas.d
    z = ((d - 1.0) * np.asarray(tau, dtype=float)) ** (1.0 / (1.0 - d))
    return pressure(z, m, d)
