"""Simulated randomized experiments and their oracle truths.

The design: covariates Z ~ N(0, I_d), treatment D ~ Bernoulli(p) with known
propensity p, outcome Y = baseline_scale * b(Z) + D * tau(Z) + eps with
Gaussian noise. The baseline is b(z) = z_2 (z_1 when d = 1). Two effect
functions are supported: identically zero, and the rectified first
coordinate max(z_1, 0).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError
from .seeding import rng_from


class CateSpec(enum.Enum):
    """Which treatment-effect function drives the outcome."""

    ZERO = "zero"
    RECTIFIED_Z1 = "rectified_z1"


@dataclass(frozen=True)
class DgpConfig:
    n: int = 1000
    d: int = 5
    cate: CateSpec = CateSpec.ZERO
    baseline_scale: float = 0.0
    noise_sd: float = 1.3
    propensity: float = 0.5

    def validate(self) -> None:
        if self.n < 4:
            raise ConfigError(f"n must be >= 4, got {self.n}")
        if self.d < 1:
            raise ConfigError(f"d must be >= 1, got {self.d}")
        if not (0.0 < self.propensity < 1.0):
            raise ConfigError(
                f"propensity must lie strictly inside (0, 1), got {self.propensity}"
            )
        if self.noise_sd <= 0:
            raise ConfigError(f"noise_sd must be > 0, got {self.noise_sd}")


@dataclass(frozen=True)
class Dataset:
    """One simulated experiment: covariates, treatment, outcome, known propensity."""

    Z: np.ndarray
    D: np.ndarray
    Y: np.ndarray
    propensity: float

    @property
    def n(self) -> int:
        return self.Y.shape[0]

    def subset(self, idx: np.ndarray) -> "Dataset":
        return Dataset(self.Z[idx], self.D[idx], self.Y[idx], self.propensity)


def true_cate(spec: CateSpec, z: np.ndarray) -> float:
    """Evaluate the true effect function at one covariate vector."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.shape[0] < 1:
        raise DimensionError("covariate vector must have dimension >= 1")
    if spec is CateSpec.ZERO:
        return 0.0
    return max(float(z[0]), 0.0)


def _cate_values(spec: CateSpec, Z: np.ndarray) -> np.ndarray:
    if spec is CateSpec.ZERO:
        return np.zeros(Z.shape[0])
    return np.maximum(Z[:, 0], 0.0)


def generate_dataset(cfg: DgpConfig, seed: int) -> Dataset:
    """Draw one experiment; pure function of (cfg, seed)."""
    cfg.validate()
    rng = rng_from(seed)
    Z = rng.standard_normal((cfg.n, cfg.d))
    D = (rng.random(cfg.n) < cfg.propensity).astype(np.int8)
    eps = cfg.noise_sd * rng.standard_normal(cfg.n)
    b = Z[:, 1] if cfg.d >= 2 else Z[:, 0]
    Y = cfg.baseline_scale * b + D * _cate_values(cfg.cate, Z) + eps
    return Dataset(Z=Z, D=D, Y=Y, propensity=cfg.propensity)


def oracle_gates_delta(spec: CateSpec) -> float:
    """True high-minus-low GATES difference under the infeasible grouping by
    the sign of z_1. Zero effect gives 0; the rectified effect gives
    E[z | z > 0] = sqrt(2/pi) for standard normal z."""
    if spec is CateSpec.ZERO:
        return 0.0
    return math.sqrt(2.0 / math.pi)


# population mean of max(z, 0) for standard normal z; used by sanity checks
MEAN_RECTIFIED_NORMAL = 1.0 / math.sqrt(2.0 * math.pi)
