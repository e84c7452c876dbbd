"""Deterministic CSV and JSON emission."""

from __future__ import annotations

import csv
import json
import math
import os

SCHEMA_LINE = "# schema=1"


def fmt(value):
    """Shortest round-trip text for numbers; empty for ``None``."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    try:
        x = float(value)
    except (TypeError, ValueError):
        return str(value)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(SCHEMA_LINE + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path):
    """``(header, rows)`` of a file written by :func:`write_csv` (values as text)."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != SCHEMA_LINE:
            raise ValueError(f"{path}: missing schema line")
        r = csv.reader(fh)
        header = next(r)
        return header, list(r)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return fmt(v)
    if hasattr(v, "item"):
        return _jsonable(v.item())
    return v


def summary_entry(value, expected=None, tol=None, passed=None):
    return {"value": _jsonable(value), "expected": _jsonable(expected),
            "tol": _jsonable(tol), "pass": passed}


def write_summary(path, entries):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(entries, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
