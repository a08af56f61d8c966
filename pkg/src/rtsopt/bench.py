"""Replicated benchmark runs, the uniform random-search baseline, and output files."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .geometry import Hyperrectangle, uniform_sample
from .objective import NoiseSpec, ObjectiveSpec, eval_true, make_objective, parse_sense, simulate
from .search import RegularTreeSearch, SearchConfig
from .splitter import SampleBalanceFn, SplitParams
from .stats import MetricStats, summarize

REP_COLUMNS = ["rep", "seed", "true_value", "estimate", "total_sims", "leaf_count",
               "max_depth", "min_leaf_depth", "deferred_splits"]
BASELINE_COLUMNS = ["rep", "seed", "true_value", "estimate", "total_sims"]
SUMMARY_COLUMNS = ["algorithm", "metric"] + MetricStats.columns()
METRICS = ("true_value", "estimate")
RTS = "regular_tree_search"
UNIFORM = "uniform_random"


@dataclass
class ExperimentConfig:
    objective: str = "rastrigin"
    dim: int = 2
    sense: Optional[str] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    center: Optional[list] = None
    noise: str = "gaussian"
    noise_scale: float = 1.0
    budget: int = 1000
    n0: int = 300
    alpha: float = 0.1
    kappa: float = 0.1
    beta: float = 1 / 3
    cp: float = 2.0
    fmin: int = 15
    reps: int = 100
    seed: int = 42
    baseline: str = "none"
    out: Optional[str] = None
    workers: int = 1
    dump_tree: bool = False
    dump_samples: bool = False

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.baseline not in ("none", UNIFORM):
            raise ValueError(f"unknown baseline {self.baseline!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        # fail fast on bad search parameters
        self.search_config(0)
        self.make_objective()
        self.make_noise()

    def make_objective(self) -> ObjectiveSpec:
        extra = {} if self.center is None else {"center": self.center}
        return make_objective(self.objective, self.dim,
                              None if self.sense is None else parse_sense(self.sense),
                              self.lower, self.upper, **extra)

    def make_noise(self) -> NoiseSpec:
        return NoiseSpec(self.noise, 0.0 if self.noise == "none" else self.noise_scale)

    def search_config(self, seed: int) -> SearchConfig:
        split = SplitParams(self.alpha, self.kappa, self.beta, SampleBalanceFn(self.fmin))
        return SearchConfig(self.budget, self.n0, split, self.cp, seed)


def rep_seed(base_seed: int, rep: int) -> int:
    """Per-replication seed: ``SeedSequence(base_seed, spawn_key=(rep,))``, 63 bits."""
    ss = np.random.SeedSequence(base_seed, spawn_key=(rep,))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


@dataclass(frozen=True)
class RepRecord:
    rep: int
    seed: int
    true_value: float
    estimate: float
    total_sims: int
    leaf_count: int
    max_depth: int
    min_leaf_depth: int
    deferred_splits: int


@dataclass(frozen=True)
class BaselineRecord:
    rep: int
    seed: int
    true_value: float
    estimate: float
    total_sims: int
    point: tuple = field(compare=False, default=())


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[RepRecord]
    baseline_records: list[BaselineRecord]
    stats: dict[str, dict[str, MetricStats]]


def uniform_random_baseline(objective: ObjectiveSpec, noise: NoiseSpec, budget: int,
                            seed: int) -> BaselineRecord:
    """Simulate ``budget`` uniform points once each and keep the best observation."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    cube = Hyperrectangle.unit(objective.dim)
    best_x, best_y = None, -np.inf
    for _ in range(budget):
        x = uniform_sample(cube, rng)
        y = simulate(objective, noise, x, rng)
        if y > best_y:
            best_x, best_y = x, y
    x_user = objective.domain_lower + objective.span * best_x
    return BaselineRecord(-1, seed, eval_true(objective, x_user), objective.sign * best_y,
                          budget, tuple(float(v) for v in x_user))


def run_replication(cfg: ExperimentConfig, rep: int) -> tuple[RepRecord, Optional[BaselineRecord]]:
    seed = rep_seed(cfg.seed, rep)
    objective, noise = cfg.make_objective(), cfg.make_noise()
    search = RegularTreeSearch(objective, noise, cfg.search_config(seed))
    res = search.run()
    if cfg.out is not None and (cfg.dump_tree or cfg.dump_samples):
        out = Path(cfg.out)
        if cfg.dump_tree:
            (out / "trees").mkdir(parents=True, exist_ok=True)
            search.tree.dump_csv(out / "trees" / f"rep_{rep:04d}.csv")
        if cfg.dump_samples:
            (out / "samples").mkdir(parents=True, exist_ok=True)
            search.store.dump_csv(out / "samples" / f"rep_{rep:04d}.csv")
    record = RepRecord(rep, seed, res.true_value_at_midpoint, res.estimate, res.total_sims,
                       res.leaf_count, res.max_depth, res.min_leaf_depth, res.deferred_splits)
    base = None
    if cfg.baseline == UNIFORM:
        b = uniform_random_baseline(objective, noise, cfg.budget, seed)
        base = BaselineRecord(rep, seed, b.true_value, b.estimate, b.total_sims, b.point)
    return record, base


def _run_one(args):
    return run_replication(*args)


def compute_stats(records, baseline_records, objective: ObjectiveSpec) -> dict[str, dict[str, MetricStats]]:
    target = objective.known_optimum[1] if objective.known_optimum is not None else 0.0
    groups = {RTS: records}
    if baseline_records:
        groups[UNIFORM] = baseline_records
    return {
        alg: {m: summarize([getattr(r, m) for r in recs], target, objective.sense) for m in METRICS}
        for alg, recs in groups.items()
    }


def run_experiment(cfg: ExperimentConfig, reps: Optional[list[int]] = None) -> ExperimentResult:
    """Run all replications (optionally in worker processes), ordered by rep index."""
    reps = list(range(cfg.reps)) if reps is None else list(reps)
    if cfg.workers > 1 and len(reps) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            pairs = list(pool.map(_run_one, [(cfg, r) for r in reps], chunksize=4))
    else:
        pairs = [run_replication(cfg, r) for r in reps]
    pairs.sort(key=lambda p: p[0].rep)
    records = [p[0] for p in pairs]
    baseline = [p[1] for p in pairs if p[1] is not None]
    return ExperimentResult(cfg, records, baseline, compute_stats(records, baseline, cfg.make_objective()))


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def format_table(stats: dict[str, dict[str, MetricStats]]) -> str:
    head = ["algorithm", "metric", "mean", "rmse", "best", "25%", "50%", "75%", "worst"]
    rows = [[alg, m] + [f"{v:.2f}" for v in s.values()]
            for alg, per in stats.items() for m, s in per.items()]
    widths = [max(len(str(r[i])) for r in [head] + rows) for i in range(len(head))]
    lines = ["  ".join(str(c).ljust(w) if i < 2 else str(c).rjust(w)
                       for i, (c, w) in enumerate(zip(r, widths))) for r in [head] + rows]
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines)


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    path.write_text(buf.getvalue())


def emit(result: ExperimentResult, out) -> str:
    """Write ``reps.csv``, ``baseline_reps.csv`` (if any) and ``summary.csv``.

    Returns the aligned text table.
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "reps.csv", REP_COLUMNS,
               [[_fmt(getattr(r, c)) for c in REP_COLUMNS] for r in result.records])
    if result.baseline_records:
        _write_csv(out / "baseline_reps.csv", BASELINE_COLUMNS,
                   [[_fmt(getattr(r, c)) for c in BASELINE_COLUMNS] for r in result.baseline_records])
    _write_csv(out / "summary.csv", SUMMARY_COLUMNS,
               [[alg, m] + [_fmt(v) for v in s.values()]
                for alg, per in result.stats.items() for m, s in per.items()])
    cfg = {k: v for k, v in asdict(result.config).items() if k != "out"}
    (out / "config.txt").write_text("".join(f"{k}={v}\n" for k, v in cfg.items() if v is not None))
    return format_table(result.stats)
