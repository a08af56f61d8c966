"""Binary partition tree over the unit cube."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import Hyperrectangle, diam, split_rect
from .samples import Cohort, SampleStore
from .splitter import SplitDecision, SplitParams, alpha_interval, find_split

log = logging.getLogger(__name__)


@dataclass(eq=False)
class TreeNode:
    id: int
    region: Hyperrectangle
    depth: int
    parent: Optional[int] = None
    children: Optional[tuple[int, int]] = None
    split: Optional[tuple[int, float]] = None
    i_count: int = 0
    i_sum: float = 0.0
    j_count: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    @property
    def mean(self) -> float:
        return self.i_sum / self.i_count


@dataclass(frozen=True)
class SplitRecord:
    """Audit entry for one applied split."""

    node: int
    depth: int
    dir: int
    z: float
    forced_random: bool
    parent_i: int
    left_i: int
    right_i: int
    lo: float
    hi: float
    n_seen: int  # store size when the split was applied


class Tree:
    """Node arena; node 0 is the root covering ``[0, 1]^dim``."""

    def __init__(self, dim: int):
        self.dim = dim
        self.nodes: list[TreeNode] = [TreeNode(0, Hyperrectangle.unit(dim), 0)]
        self.leaves: set[int] = {0}
        self.frozen: set[int] = set()
        self.deferred_splits = 0
        self.splits: list[SplitRecord] = []

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    def __getitem__(self, node_id: int) -> TreeNode:
        return self.nodes[node_id]

    def leaf_ids(self) -> list[int]:
        return sorted(self.leaves)

    @property
    def max_depth(self) -> int:
        return max(self.nodes[i].depth for i in self.leaves)

    @property
    def min_leaf_depth(self) -> int:
        return min(self.nodes[i].depth for i in self.leaves)

    def locate_leaf(self, p) -> int:
        node = self.root
        while node.children is not None:
            dir, z = node.split
            node = self.nodes[node.children[0] if p[dir] <= z else node.children[1]]
        return node.id

    def record(self, store: SampleStore, node_id: int, point, response: float,
               cohort: Cohort, check: bool = False) -> int:
        """Add a sample to leaf ``node_id`` and update ancestor aggregates."""
        node = self.nodes[node_id]
        if not node.is_leaf:
            raise ValueError(f"node {node_id} is not a leaf")
        sid = store.add_sample(node_id, point, response, cohort, node.region if check else None)
        nid: Optional[int] = node_id
        if cohort == Cohort.I:
            while nid is not None:
                n = self.nodes[nid]
                n.i_count += 1
                n.i_sum += response
                nid = n.parent
        else:
            while nid is not None:
                n = self.nodes[nid]
                n.j_count += 1
                nid = n.parent
        return sid

    def rebuild_aggregates(self, store: SampleStore) -> None:
        """Recompute every node's aggregates from the leaf indices."""
        for node in reversed(self.nodes):
            if node.is_leaf:
                ids = store.ids(node.id, Cohort.I)
                node.i_count = len(ids)
                node.i_sum = math.fsum(store.responses(ids).tolist())
                node.j_count = store.count(node.id, Cohort.J)
            else:
                a, b = (self.nodes[c] for c in node.children)
                node.i_count = a.i_count + b.i_count
                node.i_sum = a.i_sum + b.i_sum
                node.j_count = a.j_count + b.j_count

    def apply_split(self, store: SampleStore, node_id: int, decision: SplitDecision,
                    params: Optional[SplitParams] = None) -> tuple[int, int]:
        node = self.nodes[node_id]
        if not node.is_leaf:
            raise ValueError(f"node {node_id} is not a leaf")
        left_region, right_region = split_rect(node.region, decision.dir, decision.z)
        lid, rid = len(self.nodes), len(self.nodes) + 1
        self.nodes.append(TreeNode(lid, left_region, node.depth + 1, parent=node_id))
        self.nodes.append(TreeNode(rid, right_region, node.depth + 1, parent=node_id))
        node.children = (lid, rid)
        node.split = (decision.dir, decision.z)
        (li, lj), (ri, rj) = store.reassign_on_split(node_id, lid, rid, decision.dir, decision.z)
        for cid, ic, jc in ((lid, li, lj), (rid, ri, rj)):
            child = self.nodes[cid]
            child.i_count = ic
            child.i_sum = math.fsum(store.responses(store.ids(cid, Cohort.I)).tolist())
            child.j_count = jc
        self.leaves.discard(node_id)
        self.frozen.discard(node_id)
        self.leaves.update((lid, rid))
        if params is not None:
            lo, hi = alpha_interval(node.region, decision.dir, params.alpha)
        else:
            lo = hi = float("nan")
        self.splits.append(SplitRecord(node_id, node.depth, decision.dir, decision.z,
                                       decision.forced_random, node.i_count, li, ri, lo, hi,
                                       store.n))
        return lid, rid

    def try_split(self, store: SampleStore, node_id: int, params: SplitParams,
                  rng: np.random.Generator) -> Optional[tuple[int, int]]:
        """Run the splitter on a leaf; apply the split or mark the leaf deferred."""
        node = self.nodes[node_id]
        i_ids = store.ids(node_id, Cohort.I)
        j_ids = store.ids(node_id, Cohort.J)
        decision = find_split(node.region, node.depth, store.points(i_ids), store.points(j_ids),
                              store.responses(j_ids), params, rng)
        if decision is None:
            self.deferred_splits += 1
            self.frozen.add(node_id)
            log.debug("no admissible split for node %d (depth %d, I=%d, J=%d)",
                      node_id, node.depth, node.i_count, node.j_count)
            return None
        return self.apply_split(store, node_id, decision, params)

    def dump_csv(self, path) -> None:
        d = self.dim
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "depth", "parent", "leaf"]
                       + [f"lo{j}" for j in range(d)] + [f"hi{j}" for j in range(d)]
                       + ["split_dir", "split_z", "i_count", "j_count", "i_mean"])
            for n in self.nodes:
                w.writerow(
                    [n.id, n.depth, "" if n.parent is None else n.parent, int(n.is_leaf)]
                    + [repr(float(v)) for v in n.region.lower]
                    + [repr(float(v)) for v in n.region.upper]
                    + (["", ""] if n.split is None else [n.split[0], repr(float(n.split[1]))])
                    + [n.i_count, n.j_count, repr(n.mean) if n.i_count else ""]
                )

    def dump_text(self) -> str:
        lines = []

        def walk(nid, indent):
            n = self.nodes[nid]
            box = " x ".join(f"[{a:.4f},{b:.4f}]" for a, b in zip(n.region.lower, n.region.upper))
            tag = "" if n.split is None else f" split x{n.split[0]}<={n.split[1]:.6f}"
            lines.append(f"{'  ' * indent}#{n.id} d={n.depth} I={n.i_count} J={n.j_count} {box}{tag}")
            if n.children:
                for c in n.children:
                    walk(c, indent + 1)

        walk(0, 0)
        return "\n".join(lines)


def grow_stage1(store: SampleStore, params: SplitParams, rng: np.random.Generator) -> Tree:
    """Recursively split the warm-up sample held at a fresh root.

    Any leaf at depth ``c`` holding at least ``f(c)`` I-samples is split if
    an admissible split exists; otherwise it stays frozen until a later
    insertion retries it.
    """
    tree = Tree(store.dim)
    tree.rebuild_aggregates(store)
    queue = [0]
    while queue:
        nid = queue.pop(0)
        node = tree.nodes[nid]
        if node.i_count < params.f(node.depth):
            continue
        children = tree.try_split(store, nid, params, rng)
        if children is not None:
            queue.extend(children)
    return tree


def depth_diam_profile(tree: Tree) -> list[tuple[int, float]]:
    return [(tree.nodes[i].depth, diam(tree.nodes[i].region)) for i in tree.leaf_ids()]


def audit(tree: Tree, store: SampleStore, rel_tol: float = 1e-9) -> list[str]:
    """Return a list of violated structural invariants (empty when healthy)."""
    problems = []
    vol = math.fsum(tree.nodes[i].region.volume() for i in tree.leaves)
    if abs(vol - 1.0) > 1e-9:
        problems.append(f"leaf volumes sum to {vol}")
    childless = {n.id for n in tree.nodes if n.children is None}
    if childless != tree.leaves:
        problems.append("leaf set differs from childless nodes")
    for n in tree.nodes:
        if (n.children is None) != (n.split is None):
            problems.append(f"node {n.id}: children/split mismatch")
        if n.parent is not None and n.depth != tree.nodes[n.parent].depth + 1:
            problems.append(f"node {n.id}: depth rule broken")
    # full subtree scan of I-aggregates
    for n in tree.nodes:
        stack, ids = [n.id], []
        while stack:
            m = tree.nodes[stack.pop()]
            if m.children is None:
                ids.extend(store.ids(m.id, Cohort.I))
            else:
                stack.extend(m.children)
        if len(ids) != n.i_count:
            problems.append(f"node {n.id}: cached I-count {n.i_count} != {len(ids)}")
        total = math.fsum(store.responses(ids).tolist())
        if not math.isclose(total, n.i_sum, rel_tol=rel_tol, abs_tol=rel_tol):
            problems.append(f"node {n.id}: cached I-sum {n.i_sum} != {total}")
    for leaf in tree.leaves:
        region = tree.nodes[leaf].region
        for cohort in Cohort:
            ids = store.ids(leaf, cohort)
            if ids:
                pts = store.points(ids)
                if np.any(pts < region.lower) or np.any(pts > region.upper):
                    problems.append(f"leaf {leaf}: {cohort.name} sample outside region")
    for node_id, (i_ids, j_ids) in store.index.items():
        if (i_ids or j_ids) and node_id not in tree.leaves:
            problems.append(f"internal node {node_id} still indexes samples")
    return problems
