"""Horvitz-Thompson outcome scores and the studentized slope statistic.

The score Gamma_i = D_i Y_i / p - (1 - D_i) Y_i / (1 - p) is unbiased for
the CATE given covariates when the propensity p is known. Every test in
this package reduces to the slope of these scores on a centered proxy,
studentized with HC1 robust standard errors.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .dgp import Dataset
from .errors import InsufficientDataError

_DEGENERACY_TOL = 1e-10


class ZStat(NamedTuple):
    slope: float
    se: float
    zeta: float
    m: int


def ht_scores(data: Dataset) -> np.ndarray:
    p = data.propensity
    return np.where(data.D == 1, data.Y / p, -data.Y / (1.0 - p))


def slope_stat(scores: np.ndarray, proxy: np.ndarray) -> ZStat:
    """OLS slope of scores on the centered proxy with HC1 standard error.

    Returns the degenerate ZStat (all zeros) when the proxy is numerically
    constant, which makes downstream tests conservative.
    """
    scores = np.asarray(scores, dtype=float)
    proxy = np.asarray(proxy, dtype=float)
    m = scores.shape[0]
    if proxy.shape[0] != m:
        raise InsufficientDataError("scores and proxy must have equal length")
    if m < 3:
        raise InsufficientDataError(f"need at least 3 observations, got {m}")
    pbar = proxy.mean()
    x = proxy - pbar
    sxx = x @ x
    if np.sqrt(sxx / m) <= _DEGENERACY_TOL * (1.0 + abs(pbar)):
        return ZStat(0.0, 0.0, 0.0, m)
    slope = (x @ scores) / sxx
    resid = scores - scores.mean() - slope * x
    # HC1: 2 estimated parameters (intercept and slope)
    var = (m / (m - 2)) * ((x * x) @ (resid * resid)) / (sxx * sxx)
    se = float(np.sqrt(var))
    zeta = slope / se if se > _DEGENERACY_TOL else 0.0
    return ZStat(float(slope), se, float(zeta), m)
