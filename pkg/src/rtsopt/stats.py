"""Summary statistics over replications."""

from __future__ import annotations

import math
from dataclasses import dataclass, astuple, fields
from typing import Sequence

from .objective import MINIMIZE


def rmse(values: Sequence[float], target: float) -> float:
    if len(values) == 0:
        raise ValueError("rmse of an empty sample")
    return math.sqrt(math.fsum((v - target) ** 2 for v in values) / len(values))


def quantile(values: Sequence[float], q: float) -> float:
    """Linear interpolation between closest ranks, ``h = q * (n - 1)``."""
    if len(values) == 0:
        raise ValueError("quantile of an empty sample")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    xs = sorted(values)
    h = q * (len(xs) - 1)
    lo = math.floor(h)
    hi = min(lo + 1, len(xs) - 1)
    return xs[lo] + (h - lo) * (xs[hi] - xs[lo])


@dataclass(frozen=True)
class MetricStats:
    mean: float
    rmse: float
    best: float
    q25: float
    q50: float
    q75: float
    worst: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def values(self) -> tuple:
        return astuple(self)


def summarize(values: Sequence[float], target: float, sense: str = MINIMIZE) -> MetricStats:
    """Table-style statistics; ``best`` is the min when minimizing, else the max."""
    if len(values) == 0:
        raise ValueError("cannot summarize an empty sample")
    lo, hi = min(values), max(values)
    best, worst = (lo, hi) if sense == MINIMIZE else (hi, lo)
    return MetricStats(
        mean=math.fsum(values) / len(values),
        rmse=rmse(values, target),
        best=best,
        q25=quantile(values, 0.25),
        q50=quantile(values, 0.5),
        q75=quantile(values, 0.75),
        worst=worst,
    )
