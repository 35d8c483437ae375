"""Data containers shared by the characteristic solver and the R/C checker."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .waves import contact_strength


@dataclass(frozen=True)
class EntropyProfile:
    """Piecewise-constant entropy variable m(x).

    ``m_values[k]`` holds on the k-th block; blocks are separated by the
    strictly increasing ``jump_x``.
    """

    m_values: tuple[float, ...]
    jump_x: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "m_values", tuple(float(v) for v in self.m_values))
        object.__setattr__(self, "jump_x", tuple(float(v) for v in self.jump_x))
        if len(self.m_values) != len(self.jump_x) + 1:
            raise ValueError("need exactly one more m value than jump location")
        if any(not m > 0.0 for m in self.m_values):
            raise ValueError("entropy variable must be positive on every block")
        if any(b <= a for a, b in zip(self.jump_x, self.jump_x[1:])):
            raise ValueError("jump locations must be strictly increasing")

    @classmethod
    def constant(cls, m: float = 1.0) -> "EntropyProfile":
        return cls((m,), ())

    @property
    def n_blocks(self) -> int:
        return len(self.m_values)

    def jumps(self, d: float) -> list[tuple[float, float]]:
        """(x_j, Q_j) for every jump."""
        return [
            (x, contact_strength(ml, mr, d))
            for x, ml, mr in zip(self.jump_x, self.m_values, self.m_values[1:])
        ]

    @property
    def nondecreasing(self) -> bool:
        return all(b >= a for a, b in zip(self.m_values, self.m_values[1:]))

    @property
    def nonincreasing(self) -> bool:
        return all(b <= a for a, b in zip(self.m_values, self.m_values[1:]))

    @property
    def monotone(self) -> bool:
        return self.nondecreasing or self.nonincreasing

    def block_of(self, x, side: str = "right"):
        return np.searchsorted(np.asarray(self.jump_x), x, side=side)

    def m_at(self, x, side: str = "right"):
        return np.asarray(self.m_values)[self.block_of(x, side)]


@dataclass
class Snapshot:
    """All grid nodes at one time level; jump nodes appear twice (left, right)."""

    t: float
    x: np.ndarray
    block: np.ndarray
    z: np.ndarray
    u: np.ndarray
    m: np.ndarray
    r: np.ndarray
    s: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray


@dataclass
class ContactColumn:
    """History of the one-sided states at a jump, one row per time step."""

    x: float
    Q: float
    m_l: float
    m_r: float
    t: np.ndarray
    left: dict[str, np.ndarray]
    right: dict[str, np.ndarray]


@dataclass
class CharTrack:
    """A tracked characteristic curve with the solution sampled along it."""

    family: str
    x_start: float
    t: np.ndarray
    x: np.ndarray
    s: np.ndarray
    r: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    z: np.ndarray
    c: np.ndarray
    block: np.ndarray
    crossings: list[tuple[int, float]] = field(default_factory=list)
    t_exit: float | None = None

    @property
    def own(self) -> np.ndarray:
        return self.alpha if self.family == "forward" else self.beta

    @property
    def other(self) -> np.ndarray:
        return self.beta if self.family == "forward" else self.alpha


@dataclass
class CharMesh:
    profile: EntropyProfile
    d: float
    x_left: float
    x_right: float
    t_end: float
    horizon: float
    snapshots: list[Snapshot]
    contacts: list[ContactColumn]
    tracks: list[CharTrack]
    grad_scale: float
    h: float = 0.0
    grad_floor: float = 0.0  # absolute round-off level of alpha and beta

    def grad_tol(self, rel: float) -> float:
        return max(rel * self.grad_scale, self.grad_floor)
