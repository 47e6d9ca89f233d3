"""Monte Carlo laboratory for single-split vs multi-split inference on
heterogeneous treatment effects in randomized experiments."""

__version__ = "0.1.0"

from .cate_tests import (KEqualFolds, SplitPlan, TestResult, TrainTestRatio,
                         make_split, naive_dml_test, sequential_test,
                         twofold_test)
from .dgp import (CateSpec, Dataset, DgpConfig, generate_dataset,
                  oracle_gates_delta, true_cate)
from .gates import (GatesEstimate, gates_crossfit_single, gates_multisplit,
                    gates_on_validation)
from .learners import LearnerSpec, ProxyModel, fit_proxy, predict_cate
from .mining import MiningConfig, mine_max
from .multisplit import MultisplitConfig, median_even, multisplit_test
from .scores import ZStat, ht_scores, slope_stat
from .simulator import (MethodMetrics, RawRecord, StudyConfig, StudySummary,
                        merge_summaries, run_gates_study, run_zero_cate_study,
                        summarize)

__all__ = [name for name in dir() if not name.startswith("_")]
