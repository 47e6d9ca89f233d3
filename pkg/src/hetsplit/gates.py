"""Difference in group average treatment effects (GATES) between two
proxy-ranked groups.

Two inferential routes: a single-split cross-fitted estimator with a
conservative Neyman variance bound (labeled "imli_style"), and the multi-split
median-aggregated estimator (labeled "cddf") that trains on a 2/3
auxiliary part and evaluates on the 1/3 validation part of each split.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.stats import norm

from .cate_tests import KEqualFolds, TrainTestRatio, make_split
from .dgp import Dataset
from .errors import ConfigError, HetsplitError, InsufficientDataError
from .learners import LearnerSpec, make_fitter
from .multisplit import MultisplitConfig, median_even
from .scores import ht_scores
from .seeding import mix64

_SE_TOL = 1e-12
_CONST_TOL = 1e-10


class GatesEstimate(NamedTuple):
    delta_hat: float
    se: float
    ci_lower: float
    ci_upper: float
    p_value: float
    method: str
    degenerate: bool = False


@lru_cache(maxsize=None)
def _z_crit(alpha: float) -> float:
    return float(norm.ppf(1.0 - alpha / 2.0))


def _normal_ci_p(delta: float, se: float, alpha: float):
    if se > _SE_TOL:
        z = _z_crit(alpha)
        p = math.erfc(abs(delta / se) / math.sqrt(2.0))  # two-sided normal p
        return delta - z * se, delta + z * se, p
    return delta, delta, (1.0 if delta == 0.0 else 0.0)


def gates_on_validation(validation: Dataset, proxy_values: np.ndarray,
                        G: int = 2, alpha: float = 0.05,
                        method: str = "gates") -> GatesEstimate:
    """High-minus-low GATES difference on one validation sample.

    Groups split at the proxy median; ties and odd sizes resolve by a
    stable sort on (proxy, index) with the low group taking the first
    ceil(m/2) units. A constant proxy yields the degenerate result:
    delta_hat = 0 with the variance of an even index halving.
    """
    if G != 2:
        raise ConfigError(f"only G=2 groups are supported, got {G}")
    proxy_values = np.asarray(proxy_values, dtype=float)
    m = validation.n
    if proxy_values.shape[0] != m:
        raise InsufficientDataError("proxy values must align with validation rows")
    if m < 2 * G:
        raise InsufficientDataError(f"validation size {m} below {2 * G}")
    degenerate = bool(proxy_values.std() <= _CONST_TOL * (1.0 + abs(proxy_values.mean())))
    order = np.arange(m) if degenerate else np.argsort(proxy_values, kind="stable")
    n_low = (m + 1) // 2
    low, high = order[:n_low], order[n_low:]
    if low.size < 2 or high.size < 2:
        raise InsufficientDataError("a proxy group has fewer than 2 units")
    gamma = ht_scores(validation)
    return _gates_from_groups(gamma, low, high, alpha, method, degenerate)


def _gates_from_groups(gamma: np.ndarray, low: np.ndarray, high: np.ndarray,
                       alpha: float, method: str, degenerate: bool) -> GatesEstimate:
    # Conservative Neyman bound for complementary groups cut from one sample:
    # the covariance between the two group means cannot be estimated, so it
    # is bounded at perfect correlation, giving se = se_high + se_low. The
    # plain root-sum-of-squares form anti-conservatively ignores that the
    # grouping itself was learned from the same outcomes.
    g_low, g_high = gamma[low], gamma[high]
    delta = 0.0 if degenerate else float(g_high.mean() - g_low.mean())
    se = float(np.sqrt(g_high.var(ddof=1) / high.size)
               + np.sqrt(g_low.var(ddof=1) / low.size))
    lo, hi, p = _normal_ci_p(delta, se, alpha)
    return GatesEstimate(delta, se, float(lo), float(hi), float(p), method, degenerate)


def gates_crossfit_single(data: Dataset, learner: LearnerSpec, L: int = 3,
                          alpha: float = 0.05, seed: int = 0) -> GatesEstimate:
    """Single split into L folds with cross-fitting; the whole sample serves
    as validation.

    Each fold's units are ranked against their own fold's proxy median and
    the within-fold groups are pooled. Grouping against the pooled median
    would let a unit's outcome move the threshold through the proxies of
    other folds (which it helped train), producing a first-order selection
    bias under the null; the within-fold threshold depends only on data
    outside the fold and the fold's covariates, so the estimator stays
    unbiased.
    """
    plan = make_split(data.n, KEqualFolds(L), seed)
    fitter = make_fitter(data, learner) if isinstance(learner, LearnerSpec) else learner(data)
    low_parts = []
    high_parts = []
    for j in range(1, L + 1):
        ev = plan.fold(j)
        params = fitter.fit(plan.complement(j), seed=mix64(seed, j))
        proxy = fitter.predict(params, ev)
        order = ev[np.argsort(proxy, kind="stable")]
        n_low = (ev.size + 1) // 2
        low_parts.append(order[:n_low])
        high_parts.append(order[n_low:])
    low = np.concatenate(low_parts)
    high = np.concatenate(high_parts)
    if low.size < 2 or high.size < 2:
        raise InsufficientDataError("a proxy group has fewer than 2 units")
    return _gates_from_groups(ht_scores(data), low, high, alpha,
                              "imli_style", False)


def gates_multisplit(data: Dataset, learner: LearnerSpec, cfg: MultisplitConfig,
                     master_seed: int, per_split_level: str = "half") -> GatesEstimate:
    """Median aggregation over random 2/3-train / 1/3-validation splits.

    With per_split_level="half" each split's CI is built at alpha/2 so the
    aggregated interval targets 1 - alpha coverage; "full" skips that
    adjustment. The p-value is the doubled median of per-split p-values.
    """
    cfg.validate()
    if per_split_level not in ("half", "full"):
        raise ConfigError(f"per_split_level must be 'half' or 'full', got {per_split_level!r}")
    split_alpha = cfg.alpha / 2.0 if per_split_level == "half" else cfg.alpha
    fitter = make_fitter(data, learner) if isinstance(learner, LearnerSpec) else learner(data)
    deltas = np.empty(cfg.splits)
    ses = np.empty(cfg.splits)
    lowers = np.empty(cfg.splits)
    uppers = np.empty(cfg.splits)
    ps = np.empty(cfg.splits)
    for s in range(1, cfg.splits + 1):
        try:
            plan = make_split(data.n, TrainTestRatio(2.0 / 3.0), mix64(master_seed, s))
            val = plan.fold(2)
            params = fitter.fit(plan.fold(1), seed=mix64(master_seed, s, 1))
            proxy = fitter.predict(params, val)
            est = gates_on_validation(data.subset(val), proxy, alpha=split_alpha)
        except HetsplitError as e:
            raise type(e)(f"split {s}: {e}") from e
        deltas[s - 1] = est.delta_hat
        ses[s - 1] = est.se
        lowers[s - 1] = est.ci_lower
        uppers[s - 1] = est.ci_upper
        ps[s - 1] = est.p_value
    return GatesEstimate(
        median_even(deltas), median_even(ses),
        median_even(lowers), median_even(uppers),
        min(1.0, 2.0 * median_even(ps)), "cddf",
    )
