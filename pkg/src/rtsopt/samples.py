"""Append-only store of simulated observations split into two cohorts.

Cohort ``I`` responses feed leaf estimates and UCT statistics; cohort ``J``
responses are the only ones the splitter ever reads.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from .geometry import Hyperrectangle


class Cohort(enum.IntEnum):
    I = 0
    J = 1


@dataclass(frozen=True)
class Sample:
    id: int
    point: np.ndarray
    response: float
    cohort: Cohort


class SampleStore:
    """Observations plus, for every indexed node, its I and J sample ids."""

    def __init__(self, dim: int, capacity: int = 1024):
        self.dim = dim
        self._points = np.empty((max(capacity, 1), dim))
        self._resp = np.empty(max(capacity, 1))
        self._cohort = np.empty(max(capacity, 1), dtype=np.int8)
        self._node = np.empty(max(capacity, 1), dtype=np.int64)
        self.n = 0
        self.index: dict[int, tuple[list[int], list[int]]] = {}

    def __len__(self):
        return self.n

    @property
    def total_sims(self) -> int:
        return self.n

    def _grow(self):
        cap = 2 * self._resp.size
        for name in ("_points", "_resp", "_cohort", "_node"):
            old = getattr(self, name)
            new = np.empty((cap,) + old.shape[1:], dtype=old.dtype)
            new[: self.n] = old[: self.n]
            setattr(self, name, new)

    def add_sample(self, node_id: int, point, response: float, cohort: Cohort,
                   region: Hyperrectangle | None = None) -> int:
        """Append one observation and index it under ``node_id``.

        When ``region`` is given the point must lie inside it.
        """
        point = np.asarray(point, dtype=float)
        if region is not None and not region.contains(point):
            raise ValueError(f"point {point} lies outside node {node_id} region {region}")
        if self.n == self._resp.size:
            self._grow()
        sid = self.n
        self._points[sid] = point
        self._resp[sid] = response
        self._cohort[sid] = cohort
        self._node[sid] = node_id
        self.n += 1
        self.index.setdefault(node_id, ([], []))[cohort].append(sid)
        return sid

    def ids(self, node_id: int, cohort: Cohort) -> list[int]:
        entry = self.index.get(node_id)
        return entry[cohort] if entry is not None else []

    def count(self, node_id: int, cohort: Cohort) -> int:
        return len(self.ids(node_id, cohort))

    def points(self, ids) -> np.ndarray:
        return self._points[np.asarray(ids, dtype=np.int64)].reshape(-1, self.dim)

    def responses(self, ids) -> np.ndarray:
        return self._resp[np.asarray(ids, dtype=np.int64)]

    def sample(self, sid: int) -> Sample:
        if not 0 <= sid < self.n:
            raise IndexError(sid)
        return Sample(sid, self._points[sid].copy(), float(self._resp[sid]),
                      Cohort(int(self._cohort[sid])))

    def node_of(self, sid: int) -> int:
        return int(self._node[sid])

    def reassign_on_split(self, parent_id: int, left_id: int, right_id: int,
                          dir: int, z: float) -> tuple[tuple[int, int], tuple[int, int]]:
        """Route the parent's samples to its children by ``x[dir] <= z``.

        Returns ``((left_I, left_J), (right_I, right_J))``.
        """
        i_ids, j_ids = self.index.pop(parent_id, ([], []))
        left: tuple[list[int], list[int]] = ([], [])
        right: tuple[list[int], list[int]] = ([], [])
        for cohort, ids in ((Cohort.I, i_ids), (Cohort.J, j_ids)):
            if not ids:
                continue
            arr = np.asarray(ids, dtype=np.int64)
            goes_left = self._points[arr, dir] <= z
            left[cohort].extend(arr[goes_left].tolist())
            right[cohort].extend(arr[~goes_left].tolist())
            self._node[arr[goes_left]] = left_id
            self._node[arr[~goes_left]] = right_id
        self.index[left_id] = left
        self.index[right_id] = right
        return (len(left[0]), len(left[1])), (len(right[0]), len(right[1]))

    def leaf_mean_I(self, node_id: int) -> float:
        """Mean I-cohort response at a node; J samples never contribute."""
        ids = self.ids(node_id, Cohort.I)
        if not ids:
            raise ValueError(f"node {node_id} holds no I-cohort samples")
        return math.fsum(self._resp[ids].tolist()) / len(ids)

    def dump_csv(self, path) -> None:
        """Write ``id, cohort, x0..x{d-1}, response, node_id`` rows."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "cohort"] + [f"x{j}" for j in range(self.dim)] + ["response", "node_id"])
            for sid in range(self.n):
                w.writerow(
                    [sid, Cohort(int(self._cohort[sid])).name]
                    + [repr(float(v)) for v in self._points[sid]]
                    + [repr(float(self._resp[sid])), int(self._node[sid])]
                )
