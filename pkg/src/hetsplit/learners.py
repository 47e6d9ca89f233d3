"""CATE proxy learners.

Both learners follow the T-learner construction: fit outcome regressions
mu1 on treated units and mu0 on controls, and predict tau(z) as their
difference. The ridge variant works on a polynomial feature expansion,
standardized with training-fold statistics; the intercept and the
arm-specific outcome means are never penalized. The ridge penalty
multiplies the identity scaled by the arm's training size, so the
effective penalty strength is invariant to sample size.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from .dgp import Dataset
from .errors import ConfigError, DegenerateSplitError, DimensionError
from .seeding import rng_from

_SD_FLOOR = 1e-12


def _subsampled(train_idx: np.ndarray, frac: float, seed: int,
                treated: np.ndarray) -> np.ndarray:
    """A random training subset of ceil(frac * size) rows per treatment arm,
    without replacement.

    Subsampling below 1 randomizes the fit the way bagging randomizes a
    single base learner: refitting with a fresh seed gives a genuinely
    different model, not just a different fold arrangement. Sampling within
    each arm keeps both outcome regressions estimable whenever the full
    training set was.
    """
    if frac >= 1.0:
        return train_idx
    rng = rng_from(seed, 0xB16)
    parts = []
    for arm in (treated, ~treated):
        idx = train_idx[arm]
        m = max(2, int(np.ceil(frac * idx.size)))
        parts.append(idx[rng.permutation(idx.size)[:m]])
    return np.concatenate(parts)


@dataclass(frozen=True)
class LearnerSpec:
    kind: str = "ridge"  # "ridge" or "knn"
    ridge_penalty: float = 1.0
    basis_degree: int = 2
    k: int = 20
    subsample: float = 0.3

    def validate(self) -> None:
        if self.kind not in ("ridge", "knn"):
            raise ConfigError(f"unknown learner kind {self.kind!r}")
        if self.ridge_penalty < 0:
            raise ConfigError(f"ridge_penalty must be >= 0, got {self.ridge_penalty}")
        if self.basis_degree < 1:
            raise ConfigError(f"basis_degree must be >= 1, got {self.basis_degree}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if not (0.0 < self.subsample <= 1.0):
            raise ConfigError(f"subsample must lie in (0, 1], got {self.subsample}")


@lru_cache(maxsize=None)
def _monomials(d: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """All monomial exponent index tuples of total degree 1..degree, no constant."""
    out = []
    for deg in range(1, degree + 1):
        out.extend(itertools.combinations_with_replacement(range(d), deg))
    return tuple(out)


def _poly_basis(Z: np.ndarray, monos: tuple[tuple[int, ...], ...]) -> np.ndarray:
    B = np.empty((Z.shape[0], len(monos)))
    for j, mono in enumerate(monos):
        col = Z[:, mono[0]].copy()
        for v in mono[1:]:
            col *= Z[:, v]
        B[:, j] = col
    return B


class _RidgeParams(NamedTuple):
    mu: np.ndarray  # training-fold column means of the basis
    sd: np.ndarray  # training-fold column sds of the basis
    beta: np.ndarray  # tau coefficients on the standardized basis
    intercept: float  # ybar_treated - ybar_control
    n_train: int


class RidgeTFitter:
    """Fast repeated-fit engine over one dataset.

    The polynomial basis of the full covariate matrix is built once; each
    fit only subsets rows, so multi-split procedures pay a small per-fold
    cost.
    """

    def __init__(self, data: Dataset, spec: LearnerSpec):
        spec.validate()
        self.data = data
        self.spec = spec
        self.monos = _monomials(data.Z.shape[1], spec.basis_degree)
        self.basis = _poly_basis(data.Z, self.monos)

    def fit(self, train_idx: np.ndarray, seed: int = 0) -> _RidgeParams:
        train_idx = _subsampled(train_idx, self.spec.subsample, seed,
                                self.data.D[train_idx] == 1)
        B = self.basis[train_idx]
        y = self.data.Y[train_idx]
        treated = self.data.D[train_idx] == 1
        n = treated.size
        n1 = int(treated.sum())
        if n1 == 0 or n1 == n:
            raise DegenerateSplitError("training set has only one treatment arm")
        # training-fold standardization stats from raw column moments
        mu = B.sum(axis=0) / n
        q = np.einsum("ij,ij->j", B, B)
        sd = np.sqrt(np.maximum(q / n - mu * mu, 0.0))
        sd = np.where(sd < _SD_FLOOR, 1.0, sd)
        lam = self.spec.ridge_penalty
        p = len(self.monos)
        scale = np.outer(sd, sd)
        coef = []
        icpt = 0.0
        for arm, sign in ((treated, 1.0), (~treated, -1.0)):
            Ba = B[arm]
            ya = y[arm]
            na = Ba.shape[0]
            sy = ya.sum()
            ybar = sy / na
            b = Ba.sum(axis=0)
            # centered, standardized normal equations without building the
            # standardized design: sum (B-mu)(B-mu)' and sum (B-mu)(y-ybar)
            G = (Ba.T @ Ba - np.outer(b, mu) - np.outer(mu, b)
                 + na * np.outer(mu, mu)) / scale
            rhs = (Ba.T @ ya - mu * sy - ybar * (b - na * mu)) / sd
            G.flat[:: p + 1] += lam * na
            if lam > 0:
                beta_a = np.linalg.solve(G, rhs)
            else:
                beta_a = np.linalg.lstsq(G, rhs, rcond=None)[0]
            coef.append(beta_a)
            icpt += sign * ybar
        return _RidgeParams(mu, sd, coef[0] - coef[1], icpt, train_idx.size)

    def predict(self, params: _RidgeParams, eval_idx: np.ndarray) -> np.ndarray:
        X = (self.basis[eval_idx] - params.mu) / params.sd
        return X @ params.beta + params.intercept

    def predict_basis(self, params: _RidgeParams, B: np.ndarray) -> np.ndarray:
        return ((B - params.mu) / params.sd) @ params.beta + params.intercept


class KnnTFitter:
    """k-nearest-neighbor T-learner over one dataset."""

    def __init__(self, data: Dataset, spec: LearnerSpec):
        spec.validate()
        self.data = data
        self.spec = spec

    def fit(self, train_idx: np.ndarray, seed: int = 0):
        from sklearn.neighbors import KNeighborsRegressor

        train_idx = _subsampled(train_idx, self.spec.subsample, seed,
                                self.data.D[train_idx] == 1)
        Z = self.data.Z[train_idx]
        y = self.data.Y[train_idx]
        treated = self.data.D[train_idx] == 1
        n1 = int(treated.sum())
        if n1 == 0 or n1 == treated.size:
            raise DegenerateSplitError("training set has only one treatment arm")
        k = self.spec.k
        if k > n1 or k > treated.size - n1:
            raise ConfigError(
                f"k={k} exceeds a treatment arm (treated={n1}, control={treated.size - n1})"
            )
        models = []
        for arm in (treated, ~treated):
            m = KNeighborsRegressor(n_neighbors=k)
            m.fit(Z[arm], y[arm])
            models.append(m)
        return tuple(models)

    def predict(self, params, eval_idx: np.ndarray) -> np.ndarray:
        return self.predict_on(params, self.data.Z[eval_idx])

    def predict_on(self, params, Z: np.ndarray) -> np.ndarray:
        m1, m0 = params
        return m1.predict(Z) - m0.predict(Z)


def make_fitter(data: Dataset, spec: LearnerSpec):
    if spec.kind == "knn":
        return KnnTFitter(data, spec)
    return RidgeTFitter(data, spec)


class ProxyModel:
    """A fitted CATE proxy: immutable, pure to evaluate."""

    def __init__(self, name: str, train_size: int, d: int,
                 predict_fn: Callable[[np.ndarray], np.ndarray]):
        self.name = name
        self.train_size = train_size
        self.d = d
        self._predict = predict_fn

    def predict(self, Z: np.ndarray) -> np.ndarray:
        Z = np.asarray(Z, dtype=float)
        if Z.ndim != 2 or Z.shape[1] != self.d:
            raise DimensionError(
                f"expected an (m, {self.d}) covariate matrix, got shape {Z.shape}"
            )
        return self._predict(Z)


def fit_proxy(train: Dataset, spec: LearnerSpec, seed: int = 0) -> ProxyModel:
    """Fit a T-learner proxy on the whole training dataset."""
    fitter = make_fitter(train, spec)
    all_idx = np.arange(train.n)
    params = fitter.fit(all_idx, seed=seed)
    d = train.Z.shape[1]
    if spec.kind == "knn":
        predict_fn = lambda Z: fitter.predict_on(params, Z)  # noqa: E731
    else:
        monos = fitter.monos

        def predict_fn(Z, _f=fitter, _p=params, _m=monos):
            return _f.predict_basis(_p, _poly_basis(Z, _m))

    return ProxyModel(spec.kind, train.n, d, predict_fn)


def predict_cate(model: ProxyModel, Z: np.ndarray) -> np.ndarray:
    return model.predict(Z)
