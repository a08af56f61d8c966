"""Noisy simulation oracle ``Y(x) = mu(x) + eps(x)``.

The search only ever sees :func:`simulate`, which takes points on the unit
cube and returns values to be *maximized*; user domains and minimization
problems are handled here by an affine map and a sign flip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

MAXIMIZE = "maximize"
MINIMIZE = "minimize"

_SENSE_ALIASES = {"max": MAXIMIZE, "maximize": MAXIMIZE, "min": MINIMIZE, "minimize": MINIMIZE}


def parse_sense(sense: str) -> str:
    try:
        return _SENSE_ALIASES[sense.lower()]
    except KeyError:
        raise ValueError(f"unknown optimization sense {sense!r}; use 'min' or 'max'") from None


@dataclass(frozen=True, eq=False)
class ObjectiveSpec:
    """A deterministic response surface on a user-unit box.

    ``fn`` maps one user-unit point (1-d array) to a float. ``known_optimum``
    is ``(point, value)`` in user units when the optimum is known analytically.
    """

    name: str
    dim: int
    domain_lower: np.ndarray
    domain_upper: np.ndarray
    fn: Callable[[np.ndarray], float]
    sense: str = MINIMIZE
    known_optimum: Optional[tuple] = None

    def __post_init__(self):
        lo = np.asarray(self.domain_lower, dtype=float)
        hi = np.asarray(self.domain_upper, dtype=float)
        if lo.shape != (self.dim,) or hi.shape != (self.dim,):
            raise ValueError(f"domain bounds must have length dim={self.dim}")
        if not np.all(lo < hi):
            raise ValueError("domain_lower must be strictly below domain_upper")
        object.__setattr__(self, "domain_lower", lo)
        object.__setattr__(self, "domain_upper", hi)
        object.__setattr__(self, "sense", parse_sense(self.sense))
        if self.known_optimum is not None:
            x_opt, v_opt = self.known_optimum
            x_opt = np.asarray(x_opt, dtype=float)
            if x_opt.shape != (self.dim,) or np.any(x_opt < lo) or np.any(x_opt > hi):
                raise ValueError("known optimum must lie inside the domain")
            object.__setattr__(self, "known_optimum", (x_opt, float(v_opt)))

    @property
    def sign(self) -> float:
        """Multiplier taking user values to internal (maximized) values."""
        return -1.0 if self.sense == MINIMIZE else 1.0

    @property
    def span(self) -> np.ndarray:
        return self.domain_upper - self.domain_lower


@dataclass(frozen=True)
class NoiseSpec:
    """Zero-mean sub-Gaussian noise.

    ``kind`` is ``"gaussian"`` (``scale`` is sigma), ``"uniform"`` (uniform on
    ``[-scale, scale]``) or ``"none"``.
    """

    kind: str = "gaussian"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform", "none"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.scale < 0:
            raise ValueError("noise scale must be non-negative")

    @classmethod
    def gaussian(cls, sigma: float) -> "NoiseSpec":
        return cls("gaussian", sigma)

    @classmethod
    def uniform_bounded(cls, a: float, b: float) -> "NoiseSpec":
        if not a < b or not math.isclose(a, -b):
            raise ValueError("uniform noise must be symmetric about zero: a = -b < b")
        return cls("uniform", b)

    @classmethod
    def none(cls) -> "NoiseSpec":
        return cls("none", 0.0)

    @property
    def variance_proxy(self) -> float:
        if self.kind == "gaussian":
            return self.scale**2
        if self.kind == "uniform":
            # Hoeffding: bounded on [a, b] => proxy (b - a)^2 / 4
            return (2 * self.scale) ** 2 / 4
        return 0.0

    def draw(self, rng: np.random.Generator) -> float:
        if self.kind == "gaussian":
            return float(rng.normal(0.0, self.scale))
        if self.kind == "uniform":
            return float(rng.uniform(-self.scale, self.scale))
        return 0.0


def to_user(spec: ObjectiveSpec, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (spec.dim,) or np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError(f"point {p} is not in the unit cube of dimension {spec.dim}")
    return spec.domain_lower + spec.span * p


def to_norm(spec: ObjectiveSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.dim,) or np.any(x < spec.domain_lower) or np.any(x > spec.domain_upper):
        raise ValueError(f"point {x} is outside the domain of {spec.name}")
    return np.clip((x - spec.domain_lower) / spec.span, 0.0, 1.0)


def eval_true(spec: ObjectiveSpec, x_user) -> float:
    """Noise-free response in user units."""
    x = np.asarray(x_user, dtype=float)
    if x.shape != (spec.dim,) or np.any(x < spec.domain_lower) or np.any(x > spec.domain_upper):
        raise ValueError(f"point {x} is outside the domain of {spec.name}")
    return float(spec.fn(x))


def simulate(spec: ObjectiveSpec, noise: NoiseSpec, x_norm, rng: np.random.Generator) -> float:
    """One simulation replication at a unit-cube point, in internal units."""
    x = spec.domain_lower + spec.span * np.asarray(x_norm, dtype=float)
    y = float(spec.fn(x)) + noise.draw(rng)
    return spec.sign * y


# --- built-in surfaces -------------------------------------------------------


def rastrigin(x: np.ndarray) -> float:
    return float(10 * x.size + np.sum(x * x - 10 * np.cos(2 * np.pi * x)))


def _sphere(center: np.ndarray) -> Callable[[np.ndarray], float]:
    def fn(x):
        r = x - center
        return float(r @ r)

    return fn


def _step_sphere(center: np.ndarray, radius: float, jump: float) -> Callable[[np.ndarray], float]:
    def fn(x):
        r = x - center
        r2 = float(r @ r)
        return r2 + jump if r2 > radius * radius else r2

    return fn


def _abs_peak(center: np.ndarray) -> Callable[[np.ndarray], float]:
    def fn(x):
        return -float(np.sum(np.abs(x - center)))

    return fn


def _constant(value: float) -> Callable[[np.ndarray], float]:
    def fn(x):
        return value

    return fn


@dataclass
class _Builtin:
    lower: float
    upper: float
    sense: str
    factory: Callable[..., ObjectiveSpec] = field(repr=False)


def _make_rastrigin(dim, lower, upper, sense, **_):
    return ObjectiveSpec(
        "rastrigin", dim, np.full(dim, lower), np.full(dim, upper), rastrigin, sense,
        known_optimum=(np.zeros(dim), 0.0),
    )


def _center(dim, lower, upper, center):
    if center is None:
        return np.full(dim, 0.5 * (lower + upper))
    c = np.asarray(center, dtype=float)
    return np.full(dim, float(c)) if c.ndim == 0 else c


def _make_sphere(dim, lower, upper, sense, center=None, **_):
    c = _center(dim, lower, upper, center)
    return ObjectiveSpec(
        "sphere", dim, np.full(dim, lower), np.full(dim, upper), _sphere(c), sense,
        known_optimum=(c, 0.0),
    )


def _make_step_sphere(dim, lower, upper, sense, center=None, radius=0.2, jump=5.0, **_):
    c = _center(dim, lower, upper, center)
    return ObjectiveSpec(
        "step_sphere", dim, np.full(dim, lower), np.full(dim, upper),
        _step_sphere(c, radius, jump), sense, known_optimum=(c, 0.0),
    )


def _make_abs_peak(dim, lower, upper, sense, center=None, **_):
    c = _center(dim, lower, upper, center)
    return ObjectiveSpec(
        "abs_peak", dim, np.full(dim, lower), np.full(dim, upper), _abs_peak(c), sense,
        known_optimum=(c, 0.0),
    )


def _make_constant(dim, lower, upper, sense, value=0.0, **_):
    return ObjectiveSpec(
        "constant", dim, np.full(dim, lower), np.full(dim, upper), _constant(float(value)), sense,
    )


BUILTINS = {
    "rastrigin": _Builtin(-5.0, 5.0, MINIMIZE, _make_rastrigin),
    "sphere": _Builtin(-1.0, 1.0, MINIMIZE, _make_sphere),
    "step_sphere": _Builtin(-1.0, 1.0, MINIMIZE, _make_step_sphere),
    # -sum|x - c|, maximized at c
    "abs_peak": _Builtin(0.0, 1.0, MAXIMIZE, _make_abs_peak),
    "constant": _Builtin(0.0, 1.0, MAXIMIZE, _make_constant),
}


def make_objective(
    name: str,
    dim: int,
    sense: Optional[str] = None,
    lower: Optional[float] = None,
    upper: Optional[float] = None,
    **params,
) -> ObjectiveSpec:
    """Build a named surface on the box ``[lower, upper]^dim``.

    Extra keyword arguments go to the surface (``center``, ``radius``,
    ``jump``, ``value``).
    """
    if name not in BUILTINS:
        raise ValueError(f"unknown objective {name!r}; choose from {sorted(BUILTINS)}")
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    b = BUILTINS[name]
    return b.factory(
        dim,
        b.lower if lower is None else float(lower),
        b.upper if upper is None else float(upper),
        b.sense if sense is None else sense,
        **params,
    )
