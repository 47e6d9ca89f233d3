"""Raw-record persistence and table-shaped reports.

Raw per-replication records go to CSV at full float precision so any
summary can be re-derived and merged later. Markdown reports round to two
decimals and group columns single-split vs multi-split, mirroring the
layout of the benchmark tables.
"""
from __future__ import annotations

import csv
import io
import math

from .dgp import CateSpec
from .errors import ConfigError
from .simulator import (GATES_METHODS, RawRecord, StudySummary,
                        ZERO_CATE_METHODS)

RAW_COLUMNS = ("replication", "method", "estimate", "se", "p_value",
               "ci_lower", "ci_upper", "seed")

_MULTI_GROUP = {"naive_multisplit", "twofold_multisplit", "sequential_multisplit",
                "cddf", "cddf_mined"}
_PRETTY = {
    "naive": "Naive", "twofold": "2-Folds", "sequential": "Sequential",
    "naive_multisplit": "Naive", "twofold_multisplit": "2-Folds",
    "sequential_multisplit": "Sequential",
    "imli_style": "imli_style", "cddf": "cddf",
    "imli_style_mined": "imli_style (mined)", "cddf_mined": "cddf (mined)",
}


def write_raw_csv(records: list, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RAW_COLUMNS)
        for rec in records:
            w.writerow([rec.replication, rec.method, repr(rec.estimate),
                        repr(rec.se), repr(rec.p_value), repr(rec.ci_lower),
                        repr(rec.ci_upper), rec.seed])


def read_raw_csv(path) -> list:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != RAW_COLUMNS:
        raise ConfigError(f"{path}: not a raw-record CSV (bad header)")
    return [
        RawRecord(int(r[0]), r[1], float(r[2]), float(r[3]), float(r[4]),
                  float(r[5]), float(r[6]), int(r[7]))
        for r in rows[1:]
    ]


def _ordered_methods(summary: StudySummary) -> list:
    canon = ZERO_CATE_METHODS if summary.kind == "zero_cate" else GATES_METHODS
    present = [m for m in canon if m in summary.methods]
    extras = [m for m in summary.methods if m not in canon]
    return present + extras


def emit_report(summary: StudySummary, fmt: str, cate: CateSpec | None = None) -> str:
    """Render a summary as a flat CSV (full precision) or a markdown table
    (two-decimal display precision)."""
    if not summary.methods:
        raise ConfigError("empty summary")
    if fmt == "csv":
        return _emit_csv(summary)
    if fmt == "markdown":
        return _emit_markdown(summary, cate)
    raise ConfigError(f"unknown report format {fmt!r}")


def _emit_csv(summary: StudySummary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "rejection_rate", "bias", "sd", "mad", "n_replications"])
    for m in _ordered_methods(summary):
        mm = summary.methods[m]
        w.writerow([m, repr(mm.rejection_rate), repr(mm.bias), repr(mm.sd),
                    repr(mm.mad), mm.n_replications])
    return buf.getvalue()


def parse_report_csv(text: str) -> dict:
    rows = list(csv.reader(io.StringIO(text)))
    out = {}
    for r in rows[1:]:
        out[r[0]] = {
            "rejection_rate": float(r[1]), "bias": float(r[2]),
            "sd": float(r[3]), "mad": float(r[4]), "n_replications": int(r[5]),
        }
    return out


def _pct(x: float) -> str:
    return f"{100.0 * x:.2f}%"


def _num(x: float) -> str:
    return "" if math.isnan(x) else f"{x:.2f}"


def _table(header: list, rows: list) -> str:
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join(["---"] * len(header)) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _emit_markdown(summary: StudySummary, cate: CateSpec | None) -> str:
    methods = _ordered_methods(summary)
    single = [m for m in methods if m not in _MULTI_GROUP]
    multi = [m for m in methods if m in _MULTI_GROUP]

    def col(m: str) -> str:
        label = _PRETTY.get(m, m)
        if summary.kind == "zero_cate":
            group = "Multi Splits" if m in _MULTI_GROUP else "Single Split"
            return f"{group}: {label}"
        return label

    cols = single + multi
    header = [""] + [col(m) for m in cols]
    if summary.kind == "zero_cate":
        if cate is CateSpec.ZERO:
            label = "Size (False Rejection)"
        elif cate is CateSpec.RECTIFIED_Z1:
            label = "Power (Correct Rejection)"
        else:
            label = "Rejection Rate"
        rows = [[label] + [_pct(summary.methods[m].rejection_rate) for m in cols]]
    else:
        rows = [
            ["Bias"] + [_num(summary.methods[m].bias) for m in cols],
            ["SD"] + [_num(summary.methods[m].sd) for m in cols],
            ["MAD"] + [_num(summary.methods[m].mad) for m in cols],
            ["Size (False Rejection)"] + [_pct(summary.methods[m].rejection_rate)
                                          for m in cols],
        ]
    return _table(header, rows)
