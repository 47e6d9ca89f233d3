"""Seed mining: run a seeded estimator under several seeds and keep the
most favorable run, reporting its inference unadjusted."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .dgp import Dataset
from .errors import ConfigError, HetsplitError
from .gates import GatesEstimate
from .seeding import mix64


@dataclass(frozen=True)
class MiningConfig:
    mining_f: int = 5
    mine_by: str = "estimate"  # "estimate" or "pvalue"

    def validate(self) -> None:
        if self.mining_f < 1:
            raise ConfigError(f"mining_f must be >= 1, got {self.mining_f}")
        if self.mine_by not in ("estimate", "pvalue"):
            raise ConfigError(f"mine_by must be 'estimate' or 'pvalue', got {self.mine_by!r}")


def mine_max(procedure: Callable[[Dataset, int], GatesEstimate], data: Dataset,
             cfg: MiningConfig, base_seed: int) -> GatesEstimate:
    """Run the procedure under F derived seeds and return the run with the
    largest point estimate (or smallest p-value, per cfg.mine_by). Ties
    break toward the smallest seed index."""
    cfg.validate()
    best = None
    for f in range(1, cfg.mining_f + 1):
        try:
            est = procedure(data, mix64(base_seed, f))
        except HetsplitError as e:
            raise type(e)(f"mining seed {f}: {e}") from e
        if best is None:
            best = est
        elif cfg.mine_by == "estimate" and est.delta_hat > best.delta_hat:
            best = est
        elif cfg.mine_by == "pvalue" and est.p_value < best.p_value:
            best = est
    return best
