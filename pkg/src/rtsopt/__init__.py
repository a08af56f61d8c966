"""Regular Tree Search for noisy black-box optimization on boxes."""

from .geometry import Hyperrectangle, diam, dist_to_point, split_rect, uniform_sample
from .objective import NoiseSpec, ObjectiveSpec, eval_true, make_objective, simulate, to_norm, to_user
from .samples import Cohort, SampleStore
from .search import RegularTreeSearch, RunResult, SearchConfig, extract_result, run_search, uct_select
from .splitter import SampleBalanceFn, SplitDecision, SplitParams, find_split
from .tree import Tree, depth_diam_profile, grow_stage1

__all__ = [
    "Cohort", "Hyperrectangle", "NoiseSpec", "ObjectiveSpec", "RegularTreeSearch", "RunResult",
    "SampleBalanceFn", "SampleStore", "SearchConfig", "SplitDecision", "SplitParams", "Tree",
    "depth_diam_profile", "diam", "dist_to_point", "eval_true", "extract_result", "find_split",
    "grow_stage1", "make_objective", "run_search", "simulate", "split_rect", "to_norm",
    "to_user", "uct_select", "uniform_sample",
]
