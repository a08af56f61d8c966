"""Two-stage tree search: uniform warm-up, then UCT-guided sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import Hyperrectangle, dist_to_point, uniform_sample
from .objective import NoiseSpec, ObjectiveSpec, eval_true, simulate
from .samples import Cohort, SampleStore
from .splitter import SplitParams
from .tree import Tree, grow_stage1


@dataclass(frozen=True)
class SearchConfig:
    budget: int = 1000
    n0: int = 300
    split: SplitParams = field(default_factory=SplitParams)
    cp: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.n0 < 1:
            raise ValueError("stage-1 budget n0 must be >= 1")
        if self.n0 >= self.budget:
            raise ValueError(f"stage-1 budget n0={self.n0} must be below total budget {self.budget}")
        if self.cp < 0:
            raise ValueError("cp must be non-negative")


@dataclass
class RunResult:
    selected_leaf: int
    selected_region: Hyperrectangle  # user units
    midpoint: np.ndarray  # user units
    estimate: float  # user units, original sense
    true_value_at_midpoint: Optional[float]
    total_sims: int
    leaf_count: int
    max_depth: int
    min_leaf_depth: int
    deferred_splits: int
    internal_estimate: float

    def dist_to(self, x_user) -> float:
        return dist_to_point(self.selected_region, x_user)


def ucb(mean: float, n_parent: int, n_child: int, cp: float) -> float:
    return mean + cp * math.sqrt(2.0 * math.log(n_parent) / n_child)


def uct_select(tree: Tree, cp: float) -> int:
    """Descend from the root into the child with the larger UCB; ties go left."""
    nodes = tree.nodes
    node = nodes[0]
    while node.children is not None:
        a, b = nodes[node.children[0]], nodes[node.children[1]]
        if a.i_count == 0 or b.i_count == 0:
            raise RuntimeError(f"child of node {node.id} has no I-samples")
        if cp == 0.0:
            ua, ub = a.i_sum / a.i_count, b.i_sum / b.i_count
        else:
            ua = ucb(a.i_sum / a.i_count, node.i_count, a.i_count, cp)
            ub = ucb(b.i_sum / b.i_count, node.i_count, b.i_count, cp)
        node = a if ua >= ub else b
    return node.id


def extract_result(tree: Tree, store: SampleStore, objective: ObjectiveSpec,
                   config: Optional[SearchConfig] = None) -> RunResult:
    """Pick the leaf with the largest I-mean (smallest id on ties)."""
    best_id, best_mean = None, -math.inf
    for lid in tree.leaf_ids():
        if store.count(lid, Cohort.I) == 0:
            continue
        m = store.leaf_mean_I(lid)
        if m > best_mean:
            best_id, best_mean = lid, m
    if best_id is None:
        raise ValueError("no leaf holds an I-cohort sample")
    region = tree.nodes[best_id].region
    lo = objective.domain_lower + objective.span * region.lower
    hi = objective.domain_lower + objective.span * region.upper
    mid = objective.domain_lower + objective.span * region.midpoint
    mid = np.clip(mid, objective.domain_lower, objective.domain_upper)
    return RunResult(
        selected_leaf=best_id,
        selected_region=Hyperrectangle(lo, hi),
        midpoint=mid,
        estimate=objective.sign * best_mean,
        true_value_at_midpoint=eval_true(objective, mid),
        total_sims=store.total_sims,
        leaf_count=len(tree.leaves),
        max_depth=tree.max_depth,
        min_leaf_depth=tree.min_leaf_depth,
        deferred_splits=tree.deferred_splits,
        internal_estimate=best_mean,
    )


class RegularTreeSearch:
    """One replication of the search; keeps its tree and samples for inspection.

    ``replay`` is a sequence of stage-2 leaf selections recorded from an
    earlier run (``self.selections``); when given, UCT is bypassed and the
    recorded leaves are used. ``perturb_i`` maps every I-cohort response
    before it is stored, which together with ``replay`` lets the effect of
    I-responses be isolated.
    """

    def __init__(self, objective: ObjectiveSpec, noise: NoiseSpec, config: SearchConfig,
                 replay: Optional[Sequence[int]] = None,
                 perturb_i: Optional[Callable[[float], float]] = None):
        self.objective = objective
        self.noise = noise
        self.config = config
        self.replay = replay
        self.perturb_i = perturb_i
        self.rng = np.random.default_rng(config.seed)
        self.store = SampleStore(objective.dim, capacity=config.budget + 64)
        self.tree: Optional[Tree] = None
        self.selections: list[int] = []
        self.stage1_tree_leaves = 0

    def _sim(self, x) -> float:
        return simulate(self.objective, self.noise, x, self.rng)

    def _i_value(self, y: float) -> float:
        return y if self.perturb_i is None else self.perturb_i(y)

    def stage1(self) -> Tree:
        cfg, store, rng = self.config, self.store, self.rng
        cube = Hyperrectangle.unit(self.objective.dim)
        n_i = cfg.n0 // 2
        for k in range(cfg.n0):
            x = uniform_sample(cube, rng)
            y = self._sim(x)
            if k < n_i:
                store.add_sample(0, x, self._i_value(y), Cohort.I)
            else:
                store.add_sample(0, x, y, Cohort.J)
        self.tree = grow_stage1(store, cfg.split, rng)
        self.stage1_tree_leaves = len(self.tree.leaves)
        return self.tree

    def stage2(self) -> None:
        cfg, store, rng, tree = self.config, self.store, self.rng, self.tree
        f = cfg.split.f
        n = store.total_sims
        step = 0
        while n < cfg.budget:
            if self.replay is not None:
                leaf = self.replay[step]
                if not tree.nodes[leaf].is_leaf:
                    raise RuntimeError(f"replayed node {leaf} is not a leaf")
            else:
                leaf = uct_select(tree, cfg.cp)
            self.selections.append(leaf)
            step += 1
            node = tree.nodes[leaf]
            x = uniform_sample(node.region, rng)
            tree.record(store, leaf, x, self._i_value(self._sim(x)), Cohort.I)
            threshold = f(node.depth)
            if node.i_count >= threshold:
                top_up = max(threshold - node.j_count, 0)
                for _ in range(top_up):
                    xj = uniform_sample(node.region, rng)
                    tree.record(store, leaf, xj, self._sim(xj), Cohort.J)
                n += top_up
                tree.try_split(store, leaf, cfg.split, rng)
            n += 1
        assert n == store.total_sims

    def run(self) -> RunResult:
        self.stage1()
        self.stage2()
        return extract_result(self.tree, self.store, self.objective, self.config)


def run_search(objective: ObjectiveSpec, noise: NoiseSpec, config: SearchConfig) -> RunResult:
    return RegularTreeSearch(objective, noise, config).run()
