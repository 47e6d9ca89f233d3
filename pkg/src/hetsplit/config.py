"""Run-configuration parsing.

The configuration is a flat sectioned key-value document::

    [dgp]
    n = 1000
    cate = rectified_z1

    [study]
    replications = 1000

Dotted keys (``dgp.n = 1000``) work without a section header. Unknown
sections or keys are errors, never silently ignored; diagnostics carry the
line number.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .dgp import CateSpec, DgpConfig
from .errors import ConfigError
from .learners import LearnerSpec
from .mining import MiningConfig
from .multisplit import MultisplitConfig
from .simulator import StudyConfig

_TRUE = {"true", "on", "yes", "1"}
_FALSE = {"false", "off", "no", "0"}


def _as_int(raw: str, where: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{where}: expected an integer, got {raw!r}") from None


def _as_float(raw: str, where: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {raw!r}") from None


def _as_bool(raw: str, where: str) -> bool:
    low = raw.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ConfigError(f"{where}: expected a boolean, got {raw!r}")


def _as_str(raw: str, where: str) -> str:
    return raw.strip("\"'")


_CATE_NAMES = {"zero": CateSpec.ZERO, "rectified_z1": CateSpec.RECTIFIED_Z1}


def _as_cate(raw: str, where: str) -> CateSpec:
    name = _as_str(raw, where).lower()
    if name not in _CATE_NAMES:
        raise ConfigError(f"{where}: cate must be one of {sorted(_CATE_NAMES)}, got {raw!r}")
    return _CATE_NAMES[name]


def _as_methods(raw: str, where: str) -> tuple:
    return tuple(t.strip() for t in _as_str(raw, where).split(",") if t.strip())


# section -> key -> converter
_SCHEMA = {
    "dgp": {"n": _as_int, "d": _as_int, "cate": _as_cate,
            "baseline_scale": _as_float, "noise_sd": _as_float,
            "propensity": _as_float},
    "learner": {"learner": _as_str, "ridge_penalty": _as_float,
                "basis_degree": _as_int, "k": _as_int,
                "subsample": _as_float},
    "study": {"replications": _as_int, "alpha": _as_float, "seed": _as_int,
              "workers": _as_int, "methods": _as_methods,
              "per_split_level": _as_str},
    "multisplit": {"splits": _as_int, "alpha": _as_float,
                   "double_median": _as_bool},
    "mining": {"mining_f": _as_int, "mine_by": _as_str},
    "output": {"dir": _as_str, "format": _as_str},
}


@dataclass(frozen=True)
class RunConfig:
    study: StudyConfig = StudyConfig()
    output_dir: str = "."
    format: str = "markdown"

    def describe(self) -> str:
        """Every effective key and value, defaults included, for the run log."""
        s = self.study
        pairs = [
            ("dgp.n", s.dgp.n), ("dgp.d", s.dgp.d),
            ("dgp.cate", s.dgp.cate.value),
            ("dgp.baseline_scale", s.dgp.baseline_scale),
            ("dgp.noise_sd", s.dgp.noise_sd),
            ("dgp.propensity", s.dgp.propensity),
            ("learner.learner", s.learner.kind),
            ("learner.ridge_penalty", s.learner.ridge_penalty),
            ("learner.basis_degree", s.learner.basis_degree),
            ("learner.k", s.learner.k),
            ("learner.subsample", s.learner.subsample),
            ("study.replications", s.replications),
            ("study.alpha", s.alpha),
            ("study.seed", s.master_seed),
            ("study.workers", s.workers),
            ("study.methods", ",".join(s.methods) or "(all)"),
            ("study.per_split_level", s.per_split_level),
            ("multisplit.splits", s.multisplit.splits),
            ("multisplit.alpha", s.multisplit.alpha),
            ("multisplit.double_median", s.multisplit.double_median),
            ("mining.mining_f", s.mining.mining_f),
            ("mining.mine_by", s.mining.mine_by),
            ("output.dir", self.output_dir),
            ("output.format", self.format),
        ]
        return "\n".join(f"{k} = {v}" for k, v in pairs)


def _parse_pairs(text: str) -> dict:
    """Raw (section, key) -> (value, line number) mapping with diagnostics."""
    out: dict = {}
    section = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if "." in key:
            sec, key = key.split(".", 1)
        elif section is not None:
            sec = section
        else:
            raise ConfigError(f"line {lineno}: key {key!r} outside any section")
        if sec not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown section {sec!r}")
        if key not in _SCHEMA[sec]:
            raise ConfigError(f"line {lineno}: unknown key {sec}.{key!r}")
        out[(sec, key)] = (value, lineno)
    return out


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a configuration document; defaults fill in
    everything not mentioned."""
    pairs = _parse_pairs(text)
    values: dict = {}
    for (sec, key), (raw, lineno) in pairs.items():
        conv = _SCHEMA[sec][key]
        values[(sec, key)] = conv(raw, f"line {lineno}: {sec}.{key}")

    def pick(sec: str, key: str, default):
        return values.get((sec, key), default)

    dgp = DgpConfig(
        n=pick("dgp", "n", 1000), d=pick("dgp", "d", 5),
        cate=pick("dgp", "cate", CateSpec.ZERO),
        baseline_scale=pick("dgp", "baseline_scale", 0.0),
        noise_sd=pick("dgp", "noise_sd", 1.3),
        propensity=pick("dgp", "propensity", 0.5),
    )
    learner = LearnerSpec(
        kind=pick("learner", "learner", "ridge"),
        ridge_penalty=pick("learner", "ridge_penalty", 1.0),
        basis_degree=pick("learner", "basis_degree", 2),
        k=pick("learner", "k", 20),
        subsample=pick("learner", "subsample", 0.3),
    )
    multisplit = MultisplitConfig(
        splits=pick("multisplit", "splits", 100),
        alpha=pick("multisplit", "alpha", 0.05),
        double_median=pick("multisplit", "double_median", True),
    )
    mining = MiningConfig(
        mining_f=pick("mining", "mining_f", 5),
        mine_by=pick("mining", "mine_by", "estimate"),
    )
    study = StudyConfig(
        dgp=dgp, learner=learner,
        replications=pick("study", "replications", 1000),
        methods=pick("study", "methods", ()),
        multisplit=multisplit, mining=mining,
        alpha=pick("study", "alpha", 0.05),
        master_seed=pick("study", "seed", 20240101),
        workers=pick("study", "workers", 1),
        per_split_level=pick("study", "per_split_level", "half"),
    )
    cfg = RunConfig(
        study=study,
        output_dir=pick("output", "dir", "."),
        format=pick("output", "format", "markdown"),
    )
    _validate(cfg, pairs)
    return cfg


def _where(pairs: dict, sec: str, key: str) -> str:
    if (sec, key) in pairs:
        return f"line {pairs[(sec, key)][1]}: {sec}.{key}"
    return f"{sec}.{key}"


def _validate(cfg: RunConfig, pairs: dict) -> None:
    s = cfg.study
    try:
        s.dgp.validate()
        s.learner.validate()
        s.multisplit.validate()
        s.mining.validate()
    except ConfigError:
        raise
    if not (0.0 < s.alpha < 1.0):
        raise ConfigError(f"{_where(pairs, 'study', 'alpha')}: alpha must lie in (0, 1), "
                          f"got {s.alpha}")
    if s.replications < 1:
        raise ConfigError(f"{_where(pairs, 'study', 'replications')}: must be >= 1")
    if s.workers < 1:
        raise ConfigError(f"{_where(pairs, 'study', 'workers')}: must be >= 1")
    if s.per_split_level not in ("half", "full"):
        raise ConfigError(f"{_where(pairs, 'study', 'per_split_level')}: "
                          f"must be 'half' or 'full', got {s.per_split_level!r}")
    if cfg.format not in ("csv", "markdown"):
        raise ConfigError(f"{_where(pairs, 'output', 'format')}: "
                          f"must be 'csv' or 'markdown', got {cfg.format!r}")


def override(cfg: RunConfig, **kwargs) -> RunConfig:
    """Apply CLI flag overrides (flag > file > default)."""
    study_fields = {"replications", "master_seed", "workers"}
    study_updates = {k: v for k, v in kwargs.items()
                     if k in study_fields and v is not None}
    study = replace(cfg.study, **study_updates) if study_updates else cfg.study
    top = {}
    if kwargs.get("output_dir") is not None:
        top["output_dir"] = kwargs["output_dir"]
    if kwargs.get("format") is not None:
        top["format"] = kwargs["format"]
    return replace(cfg, study=study, **top)
