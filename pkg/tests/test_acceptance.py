"""Acceptance criteria. Each test reports one PASS/FAIL line (see the
"acceptance criteria" section at the end of the pytest run)."""

import csv
import math
import time
from collections import defaultdict

import numpy as np
import pytest

from _oracles import brute_force_split, ceil_exact, f_reference
from rtsopt.bench import rep_seed
from rtsopt.cli import main
from rtsopt.geometry import diam
from rtsopt.objective import NoiseSpec, make_objective
from rtsopt.samples import Cohort
from rtsopt.search import RegularTreeSearch, SearchConfig
from rtsopt.splitter import SampleBalanceFn, SplitParams, find_split
from rtsopt.geometry import Hyperrectangle

BASE_SEED = 42

D2_ARGS = ["run", "--objective", "rastrigin", "--dim", "2", "--sense", "min", "--budget", "1000",
           "--n0", "300", "--alpha", "0.1", "--kappa", "0.1", "--beta", "0.3333333", "--cp", "2.0",
           "--fmin", "15", "--reps", "100", "--seed", str(BASE_SEED), "--baseline", "uniform_random"]
D5_ARGS = ["run", "--objective", "rastrigin", "--dim", "5", "--sense", "min", "--budget", "2500",
           "--n0", "750", "--reps", "100", "--seed", str(BASE_SEED), "--baseline", "uniform_random"]


def _run_cli(args, out):
    t0 = time.perf_counter()
    assert main(args + ["--out", str(out)]) == 0
    elapsed = time.perf_counter() - t0
    summary = {(r["algorithm"], r["metric"]): {k: float(v) for k, v in r.items()
                                               if k not in ("algorithm", "metric")}
               for r in csv.DictReader(open(out / "summary.csv"))}
    return summary, elapsed


@pytest.fixture(scope="module")
def d2_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("d2")
    summary, elapsed = _run_cli(D2_ARGS, out)
    return out, summary, elapsed


@pytest.fixture(scope="module")
def d5_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("d5")
    summary, elapsed = _run_cli(D5_ARGS, out)
    return out, summary, elapsed


def test_c01_rastrigin_d2(d2_run, report):
    _, s, elapsed = d2_run
    tv = s[("regular_tree_search", "true_value")]
    est = s[("regular_tree_search", "estimate")]
    ok = 1.0 <= tv["mean"] <= 8.0 and 0.5 <= est["mean"] <= 8.0 and elapsed <= 120
    report("C1 Rastrigin d=2", ok,
           f"mean true={tv['mean']:.3f} in [1,8], rmse={tv['rmse']:.3f}; "
           f"mean estimate={est['mean']:.3f} in [0.5,8]; {elapsed:.1f}s <= 120s")
    assert ok


def test_c02_rastrigin_d5(d5_run, report):
    _, s, elapsed = d5_run
    tv = s[("regular_tree_search", "true_value")]
    ok = 4.0 <= tv["mean"] <= 18.0 and tv["q50"] <= 15.0 and elapsed <= 300
    report("C2 Rastrigin d=5", ok,
           f"mean true={tv['mean']:.3f} in [4,18]; median={tv['q50']:.3f} <= 15; "
           f"{elapsed:.1f}s <= 300s")
    assert ok


def test_c03_beats_uniform_baseline(d2_run, d5_run, report):
    parts, ok = [], True
    for d, (_, s, _) in ((2, d2_run), (5, d5_run)):
        rts = s[("regular_tree_search", "true_value")]["q50"]
        base = s[("uniform_random", "true_value")]["q50"]
        ok &= rts < base
        parts.append(f"d={d}: median true {rts:.3f} < baseline {base:.3f}")
    report("C3 ordering vs uniform random", ok, "; ".join(parts))
    assert ok


def test_c04_convergence_d1(report):
    obj = make_objective("abs_peak", 1, center=0.3)
    x_opt = np.array([0.3])
    noise = NoiseSpec.gaussian(0.1)
    t0 = time.perf_counter()
    n_dist = n_est = 0
    for rep in range(20):
        cfg = SearchConfig(20000, 500, SplitParams(), 2.0, rep_seed(BASE_SEED, rep))
        res = RegularTreeSearch(obj, noise, cfg).run()
        n_dist += res.dist_to(x_opt) <= 0.05
        n_est += abs(res.estimate - 0.0) <= 0.05
    elapsed = time.perf_counter() - t0
    ok_dist, ok_est = n_dist >= 18, n_est >= 18
    report("C4a convergence: region near x*", ok_dist, f"dist<=0.05 in {n_dist}/20 (need 18)")
    report("C4b convergence: value estimate", ok_est, f"|estimate|<=0.05 in {n_est}/20 (need 18)")
    report("C4c convergence runtime", elapsed <= 180, f"{elapsed:.1f}s <= 180s")
    assert ok_dist and elapsed <= 180
    assert ok_est, f"|estimate| <= 0.05 in only {n_est}/20 replications"


def test_c05_step_sphere(report):
    obj = make_objective("step_sphere", 2, lower=-1.0, upper=1.0, center=[0.3, -0.2],
                         radius=0.2, jump=5.0)
    x_opt = obj.known_optimum[0]
    hits = 0
    for rep in range(20):
        cfg = SearchConfig(4000, 300, SplitParams(), 2.0, rep_seed(BASE_SEED, rep))
        res = RegularTreeSearch(obj, NoiseSpec.gaussian(0.05), cfg).run()
        hits += res.dist_to(x_opt) <= 0.1
    ok = hits >= 16
    report("C5 discontinuous step-sphere", ok, f"dist<=0.1 in {hits}/20 (need 16)")
    assert ok


def _fuzzed_searches(rng):
    names = ["rastrigin", "sphere", "step_sphere", "abs_peak"]
    while True:
        d = int(rng.integers(1, 5))
        params = SplitParams(alpha=float(rng.uniform(0.01, 0.5)), kappa=float(rng.uniform(0.01, 1.0)),
                             beta=float(rng.uniform(0.05, 0.49)),
                             f=SampleBalanceFn(int(rng.integers(4, 20))))
        obj = make_objective(str(rng.choice(names)), d)
        budget = int(rng.integers(300, 1500))
        cfg = SearchConfig(budget, int(rng.integers(20, budget // 2)), params,
                           float(rng.choice([0.0, 0.5, 2.0, 10.0])), int(rng.integers(2**62)))
        s = RegularTreeSearch(obj, NoiseSpec.gaussian(float(rng.uniform(0, 2))), cfg)
        s.run()
        yield s


def test_c06_constraint_audit(report):
    rng = np.random.default_rng(606)
    audited = violations = 0
    for s in _fuzzed_searches(rng):
        p, tree, store = s.config.split, s.tree, s.store
        cohorts = np.array([store.sample(i).cohort for i in range(store.n)])
        pts = store.points(range(store.n))
        for rec in tree.splits:
            parent = tree[rec.node].region
            r_lo, r_hi = float(parent.lower[rec.dir]), float(parent.upper[rec.dir])
            lo = (1 - p.alpha) * r_lo + p.alpha * r_hi
            hi = p.alpha * r_lo + (1 - p.alpha) * r_hi
            need = ceil_exact(p.beta, f_reference(rec.depth, p.f.min_count))
            seen = pts[: rec.n_seen]
            in_parent = np.all((seen >= parent.lower) & (seen <= parent.upper), axis=1)
            is_i = cohorts[: rec.n_seen] == Cohort.I
            left = in_parent & is_i & (seen[:, rec.dir] <= rec.z)
            right = in_parent & is_i & (seen[:, rec.dir] > rec.z)
            ok = lo <= rec.z <= hi and left.sum() >= need and right.sum() >= need
            violations += not ok
            audited += 1
        if audited >= 500:
            break
    ok = violations == 0
    report("C6 constraint audit", ok, f"{audited} fuzzed splits, {violations} violations")
    assert ok


def test_c07_splitter_oracle(report):
    class NeverForced:
        def random(self):
            return 1.0

    rng = np.random.default_rng(707)
    mismatches = feasible = 0
    for _ in range(200):
        d = int(rng.integers(1, 4))
        lower = rng.uniform(0, 0.4, d)
        upper = rng.uniform(0.6, 1.0, d)
        n_i, n_j = int(rng.integers(3, 30)), int(rng.integers(0, 21))
        grid = rng.random() < 0.4

        def pts(n):
            u = rng.integers(0, 8, (n, d)) / 8 if grid else rng.random((n, d))
            return lower + (upper - lower) * u

        i_pts, j_pts = pts(n_i), pts(n_j)
        ys = rng.integers(-2, 3, n_j).astype(float) if grid else rng.normal(0, 3, n_j)
        params = SplitParams(alpha=float(rng.choice([0.05, 0.1, 0.3, 0.5])), kappa=0.1,
                             beta=float(rng.choice([0.1, 0.25, 1 / 3, 0.45])),
                             f=SampleBalanceFn(int(rng.integers(3, 15))))
        c = int(rng.integers(0, 6))
        dec = find_split(Hyperrectangle(lower, upper), c, i_pts, j_pts, ys, params, NeverForced())
        ref = brute_force_split(lower.tolist(), upper.tolist(), i_pts.tolist(), j_pts.tolist(),
                                ys.tolist(), params.alpha,
                                ceil_exact(params.beta, f_reference(c, params.f.min_count)))
        got = None if dec is None else (dec.dir, dec.z, dec.mse)
        mismatches += got != ref
        feasible += ref is not None
    ok = mismatches == 0
    report("C7 splitter vs brute force", ok,
           f"200 instances ({feasible} feasible), {mismatches} mismatches in (dir, z, mse)")
    assert ok


def test_c08_leaf_diameter_bound(report):
    d, alpha, kappa, lam = 2, 0.1, 0.1, 0.5
    obj = make_objective("rastrigin", d)
    by_depth = defaultdict(lambda: [0, 0])
    for run in range(200):
        cfg = SearchConfig(5000, 300, SplitParams(alpha=alpha, kappa=kappa), 0.0,
                           rep_seed(BASE_SEED + 8, run))
        s = RegularTreeSearch(obj, NoiseSpec.gaussian(1.0), cfg)
        s.run()
        for lid in s.tree.leaves:
            node = s.tree[lid]
            if node.depth < 40:
                continue
            thresh = math.sqrt(d) * (1 - alpha) ** ((1 - lam) * (kappa / d) * node.depth)
            by_depth[node.depth][0] += diam(node.region) >= thresh
            by_depth[node.depth][1] += 1
    worst = []
    ok = bool(by_depth)
    for c, (exceed, total) in sorted(by_depth.items()):
        bound = d * math.exp(-(lam**2 / 2) * (kappa / d) * c) + 0.05
        ok &= exceed / total <= bound
        worst.append(f"c={c}:{exceed}/{total}<= {bound:.3f}")
    report("C8 leaf diameter bound", ok,
           f"{sum(t for _, t in by_depth.values())} leaves at depth>=40; " + ", ".join(worst[:6])
           + (" ..." if len(worst) > 6 else ""))
    assert ok


def test_c09_honesty_replay(report):
    obj = make_objective("rastrigin", 2)
    worst_shift_err, changed = 0.0, 0
    for rep in range(5):
        cfg = SearchConfig(1000, 300, SplitParams(), 2.0, rep_seed(BASE_SEED + 9, rep))
        base = RegularTreeSearch(obj, NoiseSpec.gaussian(1.0), cfg)
        base.run()
        pert = RegularTreeSearch(obj, NoiseSpec.gaussian(1.0), cfg, replay=base.selections,
                                 perturb_i=lambda y: y + 1000.0)
        pert.run()
        a = [(r.node, r.dir, r.z) for r in base.tree.splits]
        b = [(r.node, r.dir, r.z) for r in pert.tree.splits]
        changed += a != b
        for lid in base.tree.leaves:
            if base.store.count(lid, Cohort.I):
                delta = pert.store.leaf_mean_I(lid) - base.store.leaf_mean_I(lid)
                worst_shift_err = max(worst_shift_err, abs(delta - 1000.0))
    ok = changed == 0 and worst_shift_err <= 1e-9
    report("C9 honesty replay", ok,
           f"splits changed in {changed}/5 runs; max |shift - 1000| = {worst_shift_err:.2e} "
           f"(float rounding, tol 1e-9)")
    assert ok


def test_c10_determinism(d2_run, tmp_path, report):
    first, _, _ = d2_run
    _run_cli(D2_ARGS, tmp_path)
    same = all((first / n).read_bytes() == (tmp_path / n).read_bytes()
               for n in ("reps.csv", "summary.csv", "baseline_reps.csv"))
    report("C10 determinism", same, "per-rep, baseline and summary CSVs byte-identical across runs")
    assert same
