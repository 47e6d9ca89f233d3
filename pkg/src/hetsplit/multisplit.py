"""Multi-split wrapper: run a single-split test over S random splits and
aggregate with the doubled median p-value."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cate_tests import TestResult
from .dgp import Dataset
from .errors import ConfigError, HetsplitError
from .seeding import mix64


@dataclass(frozen=True)
class MultisplitConfig:
    splits: int = 100
    alpha: float = 0.05
    double_median: bool = True

    def validate(self) -> None:
        if self.splits < 1:
            raise ConfigError(f"splits must be >= 1, got {self.splits}")
        if not (0.0 < self.alpha < 1.0):
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")


def median_even(values) -> float:
    """Median with the average-of-central-pair rule for even counts."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ConfigError("median of an empty collection")
    return float(np.median(values))


def multisplit_test(test: Callable[[Dataset, int], TestResult], data: Dataset,
                    cfg: MultisplitConfig, master_seed: int) -> TestResult:
    """Adjusted p-value = min(1, 2 * median of per-split p-values).

    Split seeds derive from (master_seed, split index), so the result does
    not depend on execution order. With double_median off the raw median is
    reported instead (for sensitivity analysis only; not level-valid in
    general).
    """
    cfg.validate()
    p_values = np.empty(cfg.splits)
    stats = np.empty(cfg.splits)
    method = ""
    for s in range(1, cfg.splits + 1):
        try:
            res = test(data, mix64(master_seed, s))
        except HetsplitError as e:
            raise type(e)(f"split {s}: {e}") from e
        p_values[s - 1] = res.p_value
        stats[s - 1] = res.statistic
        method = res.method
    p_med = median_even(p_values)
    p_adj = min(1.0, 2.0 * p_med) if cfg.double_median else p_med
    return TestResult(p_adj, median_even(stats), f"{method}_multisplit", data.n)
