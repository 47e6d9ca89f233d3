import numpy as np
import pytest
from scipy.stats import kstest

from hetsplit.dgp import CateSpec, Dataset, DgpConfig, generate_dataset
from hetsplit.errors import InsufficientDataError
from hetsplit.scores import ht_scores, slope_stat
from hetsplit.seeding import mix64, rng_from


def test_ht_score_pointwise_values():
    data = Dataset(np.zeros((2, 1)), np.array([1, 0]), np.array([2.0, 2.0]), 0.5)
    gamma = ht_scores(data)
    assert gamma[0] == 4.0
    assert gamma[1] == -4.0


def test_ht_scores_mean_zero_under_null():
    cfg = DgpConfig(n=1_000_000, cate=CateSpec.ZERO, baseline_scale=0.0)
    gamma = ht_scores(generate_dataset(cfg, 31))
    se = gamma.std() / np.sqrt(gamma.size)
    assert abs(gamma.mean()) < 3 * se


def test_hand_computed_slope():
    # centered proxy (-1, 0, 1), centered scores (-1, 1, 0): slope = 1/2
    z = slope_stat(np.array([1.0, 3.0, 2.0]), np.array([0.0, 1.0, 2.0]))
    assert z.slope == pytest.approx(0.5, abs=1e-12)
    assert z.m == 3


def test_degenerate_constant_proxy():
    z = slope_stat(np.array([1.0, 2.0, 3.0, 4.0]), np.array([5.0, 5.0, 5.0, 5.0]))
    assert z == (0.0, 0.0, 0.0, 4)


def test_regression_on_itself_has_unit_slope():
    v = np.array([0.3, -1.2, 0.7, 2.2, -0.4])
    z = slope_stat(v, v)
    assert z.slope == pytest.approx(1.0, abs=1e-12)


def test_too_few_observations():
    with pytest.raises(InsufficientDataError):
        slope_stat(np.array([1.0, 2.0]), np.array([0.0, 1.0]))


def test_zeta_sign_under_proxy_rescaling():
    rng = np.random.default_rng(5)
    scores = rng.standard_normal(60)
    proxy = rng.standard_normal(60)
    base = slope_stat(scores, proxy)
    up = slope_stat(scores, 3.7 * proxy)
    down = slope_stat(scores, -2.0 * proxy)
    assert up.zeta == pytest.approx(base.zeta, rel=1e-10)
    assert down.zeta == pytest.approx(-base.zeta, rel=1e-10)


def test_translation_invariance():
    rng = np.random.default_rng(6)
    scores = rng.standard_normal(50)
    proxy = rng.standard_normal(50)
    a = slope_stat(scores, proxy)
    b = slope_stat(scores, proxy + 123.456)
    assert a.slope == pytest.approx(b.slope, rel=1e-9)
    assert a.se == pytest.approx(b.se, rel=1e-9)
    assert a.zeta == pytest.approx(b.zeta, rel=1e-9)


def test_null_calibration_against_standard_normal():
    # independent non-degenerate proxy + zero-CATE scores: zeta ~ N(0,1)
    cfg = DgpConfig(n=333, cate=CateSpec.ZERO)
    zetas = np.empty(2000)
    for r in range(2000):
        data = generate_dataset(cfg, mix64(777, r))
        proxy = rng_from(888, r).standard_normal(cfg.n)
        zetas[r] = slope_stat(ht_scores(data), proxy).zeta
    assert kstest(zetas, "norm").pvalue > 0.01
