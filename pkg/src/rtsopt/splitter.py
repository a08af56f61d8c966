"""Split selection for a single leaf.

A split ``(dir, z)`` is admissible when ``z`` lies in the alpha-interval of
the leaf along ``dir`` and both children keep at least ``ceil(beta * f(c))``
I-cohort points. Among admissible splits the one with the smallest summed
squared error of the J-cohort responses wins. With probability ``kappa`` the
direction is drawn at random first and only that direction is searched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import Hyperrectangle

# slack when taking ceil(beta * f) so that e.g. (1/3) * 15 -> 5, not 6
_CEIL_EPS = 1e-9


@dataclass(frozen=True)
class SampleBalanceFn:
    """``f(c) = max(ceil(c ln c), min_count)`` with ``f(-1) = 0``."""

    min_count: int = 15

    def __post_init__(self):
        if int(self.min_count) != self.min_count or self.min_count < 1:
            raise ValueError("min_count must be a positive integer")

    def __call__(self, c: int) -> int:
        return f_eval(self, c)


def f_eval(fn: SampleBalanceFn, c: int) -> int:
    if c < -1:
        raise ValueError("depth must be >= -1")
    if c == -1:
        return 0
    if c <= 1:
        return fn.min_count
    return max(math.ceil(c * math.log(c)), fn.min_count)


@dataclass(frozen=True)
class SplitParams:
    alpha: float = 0.1
    kappa: float = 0.1
    beta: float = 1 / 3
    f: SampleBalanceFn = field(default_factory=SampleBalanceFn)

    def __post_init__(self):
        if not 0 < self.alpha <= 0.5:
            raise ValueError("alpha must lie in (0, 0.5]")
        if not 0 < self.kappa <= 1:
            raise ValueError("kappa must lie in (0, 1]")
        if not 0 < self.beta < 0.5:
            raise ValueError("beta must lie in (0, 0.5)")

    def min_child_count(self, c: int) -> int:
        """Smallest I-count each child of a depth-``c`` node may keep."""
        return math.ceil(self.beta * self.f(c) - _CEIL_EPS)


@dataclass(frozen=True)
class SplitDecision:
    dir: int
    z: float
    forced_random: bool
    mse: float


def alpha_interval(rect: Hyperrectangle, dir: int, alpha: float) -> tuple[float, float]:
    lo, hi = float(rect.lower[dir]), float(rect.upper[dir])
    return (1 - alpha) * lo + alpha * hi, alpha * lo + (1 - alpha) * hi


def candidate_values(j_coords, interval: tuple[float, float]) -> np.ndarray:
    """Midpoints between consecutive distinct J coordinates inside ``interval``.

    Falls back to the interval midpoint when no midpoint survives.
    """
    lo, hi = interval
    xs = np.unique(np.asarray(j_coords, dtype=float))
    mids = 0.5 * (xs[:-1] + xs[1:])
    mids = mids[(mids >= lo) & (mids <= hi)]
    if mids.size == 0:
        return np.array([0.5 * (lo + hi)])
    return mids


def _sse(ys) -> float:
    if len(ys) == 0:
        return 0.0
    m = math.fsum(ys) / len(ys)
    d = np.asarray(ys, dtype=float) - m
    return math.fsum((d * d).tolist())


def mse_of_split(coords, responses, z: float) -> float:
    """Within-child sum of squared deviations for a cut at ``z``.

    Points with ``coord <= z`` go left. Summation is exact-rounded, so the
    value does not depend on sample order.
    """
    coords = np.asarray(coords, dtype=float)
    responses = np.asarray(responses, dtype=float)
    left = coords <= z
    return _sse(responses[left].tolist()) + _sse(responses[~left].tolist())


def _best_in_direction(rect, dir, i_coords_sorted, j_coords, j_resp, need, alpha):
    cands = candidate_values(j_coords, alpha_interval(rect, dir, alpha))
    n_i = i_coords_sorted.size
    n_left_i = np.searchsorted(i_coords_sorted, cands, side="right")
    feasible = (n_left_i >= need) & (n_i - n_left_i >= need)
    if not feasible.any():
        return None
    cands = cands[feasible]
    n_j = j_coords.size
    if n_j <= 1:
        return 0.0, float(cands[0])

    order = np.argsort(j_coords, kind="stable")
    xs, ys = j_coords[order], j_resp[order]
    s1 = np.concatenate(([0.0], np.cumsum(ys)))
    s2 = np.concatenate(([0.0], np.cumsum(ys * ys)))
    k = np.searchsorted(xs, cands, side="right")
    kr = n_j - k
    with np.errstate(divide="ignore", invalid="ignore"):
        left = np.where(k > 0, s2[k] - s1[k] ** 2 / np.maximum(k, 1), 0.0)
        right = np.where(kr > 0, (s2[-1] - s2[k]) - (s1[-1] - s1[k]) ** 2 / np.maximum(kr, 1), 0.0)
    approx = left + right
    # prefix-sum SSE is only a screen; near-minimal candidates are rescored exactly
    tol = 1e-9 * (s2[-1] + 1.0)
    near = np.flatnonzero(approx <= approx.min() + tol)
    best = None
    for idx in near:
        z = float(cands[idx])
        kk = int(k[idx])
        score = _sse(ys[:kk].tolist()) + _sse(ys[kk:].tolist())
        if best is None or score < best[0]:
            best = (score, z)
    return best


def find_split(
    rect: Hyperrectangle,
    depth: int,
    i_points,
    j_points,
    j_responses,
    params: SplitParams,
    rng: np.random.Generator,
) -> Optional[SplitDecision]:
    """Choose a split for a leaf, or return ``None`` when none is admissible.

    ``i_points`` / ``j_points`` are ``(n, d)`` arrays of the leaf's I and J
    cohort locations; only the J responses are used for scoring. Ties are
    broken by smaller direction, then smaller split value.
    """
    d = rect.dim
    i_points = np.asarray(i_points, dtype=float).reshape(-1, d)
    j_points = np.asarray(j_points, dtype=float).reshape(-1, d)
    j_responses = np.asarray(j_responses, dtype=float)
    need = params.min_child_count(depth)

    def search(dir):
        return _best_in_direction(
            rect, dir, np.sort(i_points[:, dir]), j_points[:, dir], j_responses, need, params.alpha
        )

    if rng.random() < params.kappa:
        dir = int(rng.integers(d))
        hit = search(dir)
        if hit is not None:
            return SplitDecision(dir, hit[1], True, hit[0])
        # forced direction infeasible: fall through to the full search

    best = None
    for dir in range(d):
        hit = search(dir)
        if hit is not None and (best is None or hit[0] < best[0]):
            best = (hit[0], hit[1], dir)
    if best is None:
        return None
    return SplitDecision(best[2], best[1], False, best[0])
