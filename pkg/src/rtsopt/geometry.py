"""Axis-aligned boxes on the normalized unit cube."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Hyperrectangle:
    """Box ``prod_j [lower[j], upper[j]]`` with strictly positive widths."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).copy()
        upper = np.asarray(self.upper, dtype=float).copy()
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size == 0:
            raise ValueError("lower and upper must be 1-d vectors of equal length d >= 1")
        if not np.all(lower < upper):
            raise ValueError(f"degenerate or inverted box: lower={lower}, upper={upper}")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def unit(cls, dim: int) -> "Hyperrectangle":
        return cls(np.zeros(dim), np.ones(dim))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def volume(self) -> float:
        return float(np.prod(self.widths))

    def contains(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lower) and np.all(p <= self.upper))

    def __eq__(self, other):
        if not isinstance(other, Hyperrectangle):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    def __hash__(self):
        return hash((self.lower.tobytes(), self.upper.tobytes()))

    def __repr__(self):
        sides = " x ".join(f"[{lo:.6g}, {hi:.6g}]" for lo, hi in zip(self.lower, self.upper))
        return f"Hyperrectangle({sides})"


def diam(rect: Hyperrectangle) -> float:
    """Euclidean length of the box diagonal."""
    return math.sqrt(float(np.sum(rect.widths**2)))


def dist_to_point(rect: Hyperrectangle, p) -> float:
    """Distance from ``p`` to the nearest point of ``rect`` (0 inside)."""
    p = np.asarray(p, dtype=float)
    if p.shape != rect.lower.shape:
        raise ValueError(f"dimension mismatch: point has shape {p.shape}, box has d={rect.dim}")
    nearest = np.clip(p, rect.lower, rect.upper)
    return math.sqrt(float(np.sum((p - nearest) ** 2)))


def uniform_sample(rect: Hyperrectangle, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(rect.dim)
    # rounding in lower + w*u may overshoot upper by one ulp
    return np.minimum(rect.lower + rect.widths * u, rect.upper)


def split_rect(rect: Hyperrectangle, dir: int, z: float) -> tuple[Hyperrectangle, Hyperrectangle]:
    """Cut ``rect`` at ``x[dir] = z``; the left child keeps ``x[dir] <= z``."""
    if not 0 <= dir < rect.dim:
        raise ValueError(f"split direction {dir} out of range for d={rect.dim}")
    if not rect.lower[dir] < z < rect.upper[dir]:
        raise ValueError(
            f"split value {z} not strictly inside ({rect.lower[dir]}, {rect.upper[dir]})"
        )
    left_upper = rect.upper.copy()
    left_upper[dir] = z
    right_lower = rect.lower.copy()
    right_lower[dir] = z
    return Hyperrectangle(rect.lower, left_upper), Hyperrectangle(right_lower, rect.upper)
