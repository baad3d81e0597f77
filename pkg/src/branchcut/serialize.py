"""Deterministic JSON and CSV output.

Floats are written with ``%.17g``, keys are sorted and complex numbers become
``[re, im]`` pairs, so ``dumps(loads(dumps(x))) == dumps(x)`` byte for byte.
"""
from __future__ import annotations

import io
import json
import math
from fractions import Fraction
from typing import Any

import numpy as np

from .exact import QSqrt, frac_str


def plain(obj: Any) -> Any:
    """Reduce reports, numpy values and exact scalars to JSON-compatible data."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, QSqrt):
        return obj.to_json()
    if isinstance(obj, np.ndarray):
        return [plain(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        return [plain(x) for x in obj]
    if hasattr(obj, "to_json"):
        return plain(obj.to_json())
    return str(obj)


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = "%.17g" % x
    return "0" if s == "-0" else s


def _emit(v: Any, out: list, indent: int, level: int) -> None:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ","
    colon = ": " if indent else ":"
    if v is None:
        out.append("null")
    elif v is True:
        out.append("true")
    elif v is False:
        out.append("false")
    elif isinstance(v, int):
        out.append(str(v))
    elif isinstance(v, float):
        out.append(_fmt_float(v))
    elif isinstance(v, str):
        out.append(json.dumps(v, ensure_ascii=False))
    elif isinstance(v, list):
        if not v:
            out.append("[]")
            return
        out.append("[")
        for i, x in enumerate(v):
            if i:
                out.append(sep)
            out.append(pad)
            _emit(x, out, indent, level + 1)
        out.append(end + "]")
    elif isinstance(v, dict):
        if not v:
            out.append("{}")
            return
        out.append("{")
        for i, k in enumerate(sorted(v)):
            if i:
                out.append(sep)
            out.append(pad + json.dumps(k, ensure_ascii=False) + colon)
            _emit(v[k], out, indent, level + 1)
        out.append(end + "}")
    else:
        raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(obj: Any, indent: int = 1) -> str:
    out: list[str] = []
    _emit(plain(obj), out, indent, 0)
    return "".join(out) + "\n"


def loads(text: str) -> Any:
    return json.loads(text)


def _rows_from_moments(d: dict) -> list[list]:
    vals = d.get("moments") or d.get("values") or []
    errs = d.get("errors") or [0.0] * len(vals)
    method = d.get("method", "")
    return [[k, v[0], v[1], method, e] for k, (v, e) in enumerate(zip(vals, errs))]


def find_table(report: Any) -> tuple[str, list[list]]:
    """First moment table or grid inside a report: ``(kind, rows)``."""
    if isinstance(report, dict):
        if "moments" in report and isinstance(report["moments"], list) and "method" in report:
            return "moments", _rows_from_moments(report)
        if "grid" in report and "method" in report:
            rows = []
            errs = report.get("errors") or []
            for i, row in enumerate(report["grid"]):
                for j, v in enumerate(row):
                    e = errs[i][j] if errs else 0.0
                    rows.append([i, j, v[0], v[1], report["method"], e])
            return "grid", rows
        for k in sorted(report):
            try:
                return find_table(report[k])
            except LookupError:
                continue
    elif isinstance(report, list):
        for x in report:
            try:
                return find_table(x)
            except LookupError:
                continue
    raise LookupError("report contains no moment table")


def to_csv(report: Any) -> str:
    kind, rows = find_table(plain(report))
    header = ["k", "re", "im", "method", "err"] if kind == "moments" else ["i", "j", "re", "im", "method", "err"]
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(_fmt_float(x) if isinstance(x, float) else str(x) for x in r) + "\n")
    return buf.getvalue()
