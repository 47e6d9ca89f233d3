"""Replication engine for the size/power and GATES studies.

Each replication draws a fresh experiment and runs every requested method
on it. All randomness derives from (master_seed, replication, method,
split, mining seed) through the 64-bit mixer, so a study is a pure
function of its configuration: results are bit-identical for any worker
count and scheduling order.
"""
from __future__ import annotations

import math
import time
import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cate_tests import naive_dml_test, sequential_test, twofold_test
from .dgp import DgpConfig, generate_dataset, oracle_gates_delta
from .errors import ConfigError, HetsplitError, MergeError
from .gates import gates_crossfit_single, gates_multisplit
from .learners import LearnerSpec, make_fitter
from .mining import MiningConfig, mine_max
from .multisplit import MultisplitConfig, multisplit_test
from .seeding import mix64

ZERO_CATE_METHODS = (
    "naive", "twofold", "sequential",
    "naive_multisplit", "twofold_multisplit", "sequential_multisplit",
)
GATES_METHODS = ("imli_style", "cddf", "imli_style_mined", "cddf_mined")


class RawRecord(NamedTuple):
    """One (replication, method) outcome; the unit of persistence."""

    replication: int
    method: str
    estimate: float
    se: float
    p_value: float
    ci_lower: float
    ci_upper: float
    seed: int


@dataclass(frozen=True)
class StudyConfig:
    dgp: DgpConfig = DgpConfig()
    learner: LearnerSpec = LearnerSpec()
    replications: int = 1000
    methods: tuple = ()
    multisplit: MultisplitConfig = MultisplitConfig()
    mining: MiningConfig = MiningConfig()
    alpha: float = 0.05
    master_seed: int = 20240101
    workers: int = 1
    per_split_level: str = "half"

    def validate(self, kind: str) -> None:
        self.dgp.validate()
        self.learner.validate()
        self.multisplit.validate()
        self.mining.validate()
        if self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")
        if not (0.0 < self.alpha < 1.0):
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.per_split_level not in ("half", "full"):
            raise ConfigError(f"per_split_level must be 'half' or 'full'")
        allowed = ZERO_CATE_METHODS if kind == "zero_cate" else GATES_METHODS
        for m in self.methods:
            if m not in allowed:
                raise ConfigError(f"unknown method {m!r} for a {kind} study")


def with_methods(cfg: StudyConfig, kind: str) -> StudyConfig:
    """Fill in the default method list (all methods of the study kind)."""
    if cfg.methods:
        return cfg
    methods = ZERO_CATE_METHODS if kind == "zero_cate" else GATES_METHODS
    return dataclasses.replace(cfg, methods=methods)


@dataclass(frozen=True)
class MethodMetrics:
    rejection_rate: float
    bias: float
    sd: float
    mad: float
    n_replications: int


@dataclass(frozen=True)
class StudySummary:
    kind: str  # "zero_cate" or "gates"
    methods: dict
    alpha: float
    delta_true: float
    n_replications: int
    runtime: float = 0.0


class StudyResult(NamedTuple):
    summary: StudySummary
    records: list


def _data_seed(cfg: StudyConfig, r: int) -> int:
    return mix64(cfg.master_seed, r, 0)


def _method_seed(cfg: StudyConfig, r: int, method: str) -> int:
    # method index offset by 1 keeps the data seed's slot distinct
    allowed = ZERO_CATE_METHODS if method in ZERO_CATE_METHODS else GATES_METHODS
    return mix64(cfg.master_seed, r, allowed.index(method) + 1)


def _zero_cate_rep(cfg: StudyConfig, r: int) -> list:
    data = generate_dataset(cfg.dgp, _data_seed(cfg, r))
    fitter = make_fitter(data, cfg.learner)
    factory = lambda _d: fitter  # noqa: E731 — reuse the precomputed basis
    single = {
        "naive": lambda d, s: naive_dml_test(d, factory, K=3, seed=s),
        "twofold": lambda d, s: twofold_test(d, factory, train_ratio=2.0 / 3.0, seed=s),
        "sequential": lambda d, s: sequential_test(d, factory, K=3, seed=s),
    }
    records = []
    for method in cfg.methods:
        seed = _method_seed(cfg, r, method)
        base = method.removesuffix("_multisplit")
        if method.endswith("_multisplit"):
            res = multisplit_test(single[base], data, cfg.multisplit, seed)
        else:
            res = single[base](data, seed)
        records.append(RawRecord(r, method, res.statistic, math.nan,
                                 res.p_value, math.nan, math.nan, seed))
    return records


def _gates_rep(cfg: StudyConfig, r: int) -> list:
    data = generate_dataset(cfg.dgp, _data_seed(cfg, r))
    fitter = make_fitter(data, cfg.learner)
    factory = lambda _d: fitter  # noqa: E731
    imli = lambda d, s: gates_crossfit_single(d, factory, L=3, alpha=cfg.alpha, seed=s)  # noqa: E731
    cddf = lambda d, s: gates_multisplit(  # noqa: E731
        d, factory, cfg.multisplit, s, per_split_level=cfg.per_split_level)
    records = []
    for method in cfg.methods:
        seed = _method_seed(cfg, r, method)
        if method == "imli_style":
            est = imli(data, seed)
        elif method == "cddf":
            est = cddf(data, seed)
        elif method == "imli_style_mined":
            est = mine_max(imli, data, cfg.mining, seed)
        elif method == "cddf_mined":
            est = mine_max(cddf, data, cfg.mining, seed)
        else:
            raise ConfigError(f"unknown GATES method {method!r}")
        records.append(RawRecord(r, method, est.delta_hat, est.se, est.p_value,
                                 est.ci_lower, est.ci_upper, seed))
    return records


def _run_chunk(cfg: StudyConfig, kind: str, reps: list) -> list:
    rep_fn = _zero_cate_rep if kind == "zero_cate" else _gates_rep
    out = []
    for r in reps:
        try:
            out.extend(rep_fn(cfg, r))
        except HetsplitError as e:
            raise type(e)(f"replication {r}: {e}") from e
    return out


def _collect_records(cfg: StudyConfig, kind: str) -> list:
    reps = list(range(1, cfg.replications + 1))
    if cfg.workers == 1 or cfg.replications == 1:
        records = _run_chunk(cfg, kind, reps)
    else:
        n_chunks = min(cfg.workers * 4, cfg.replications)
        chunks = [[int(r) for r in c] for c in np.array_split(reps, n_chunks)]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(_run_chunk, [cfg] * len(chunks),
                                  [kind] * len(chunks), chunks))
        records = [rec for part in parts for rec in part]
    order = {m: i for i, m in enumerate(cfg.methods)}
    records.sort(key=lambda rec: (rec.replication, order[rec.method]))
    return records


def summarize(records: list, alpha: float, delta_true: float, kind: str,
              runtime: float = 0.0) -> StudySummary:
    """Compute per-method metrics from raw records. Bias/SD/MAD are only
    meaningful for estimator (GATES) studies; they are NaN for tests."""
    by_method: dict = {}
    for rec in records:
        by_method.setdefault(rec.method, []).append(rec)
    methods = {}
    n_reps = 0
    for method, recs in by_method.items():
        # fixed accumulation order makes summaries independent of how the
        # records were partitioned or scheduled
        recs = sorted(recs, key=lambda rec: rec.replication)
        p = np.array([rec.p_value for rec in recs])
        est = np.array([rec.estimate for rec in recs])
        n = len(recs)
        n_reps = max(n_reps, n)
        if kind == "gates":
            bias = float(est.mean() - delta_true)
            sd = float(est.std(ddof=1)) if n > 1 else 0.0
            mad = float(np.abs(est - delta_true).mean())
        else:
            bias = sd = mad = math.nan
        methods[method] = MethodMetrics(
            rejection_rate=float((p <= alpha).mean()),
            bias=bias, sd=sd, mad=mad, n_replications=n,
        )
    return StudySummary(kind, methods, alpha, delta_true, n_reps, runtime)


def merge_summaries(parts: list, alpha: float, delta_true: float,
                    kind: str) -> StudySummary:
    """Merge raw per-replication record batches; identical to a single-pass
    computation over the pooled records."""
    if not parts:
        raise MergeError("no record batches to merge")
    pooled = [rec for part in parts for rec in part]
    # homogeneity: every replication must cover the same method set, which
    # holds for any partition of one study's records but not for records
    # pooled across studies with different method lists
    per_rep: dict = {}
    for rec in pooled:
        per_rep.setdefault(rec.replication, set()).add(rec.method)
    if len({frozenset(s) for s in per_rep.values()}) != 1:
        raise MergeError("record batches cover heterogeneous method sets")
    return summarize(pooled, alpha, delta_true, kind)


def run_zero_cate_study(cfg: StudyConfig) -> StudyResult:
    cfg = with_methods(cfg, "zero_cate")
    cfg.validate("zero_cate")
    t0 = time.perf_counter()
    records = _collect_records(cfg, "zero_cate")
    runtime = time.perf_counter() - t0
    return StudyResult(summarize(records, cfg.alpha, 0.0, "zero_cate", runtime), records)


def run_gates_study(cfg: StudyConfig) -> StudyResult:
    cfg = with_methods(cfg, "gates")
    cfg.validate("gates")
    t0 = time.perf_counter()
    records = _collect_records(cfg, "gates")
    runtime = time.perf_counter() - t0
    delta_true = oracle_gates_delta(cfg.dgp.cate)
    return StudyResult(summarize(records, cfg.alpha, delta_true, "gates", runtime), records)


def derived_seeds(cfg: StudyConfig, kind: str) -> list:
    """Every seed the study will consume, for collision auditing."""
    cfg = with_methods(cfg, kind)
    seeds = []
    for r in range(1, cfg.replications + 1):
        seeds.append(_data_seed(cfg, r))
        for method in cfg.methods:
            base = _method_seed(cfg, r, method)
            seeds.append(base)
            if method.endswith("_multisplit") or method == "cddf":
                seeds.extend(mix64(base, s) for s in range(1, cfg.multisplit.splits + 1))
            elif method.endswith("_mined"):
                for f in range(1, cfg.mining.mining_f + 1):
                    fs = mix64(base, f)
                    seeds.append(fs)
                    if method.startswith("cddf"):
                        seeds.extend(mix64(fs, s) for s in range(1, cfg.multisplit.splits + 1))
    return seeds
