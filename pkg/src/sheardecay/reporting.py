"""Artifact writers: CSV, JSON, and gnuplot-ready tables.

All files are UTF-8 with LF newlines; floats carry 17 significant digits so
that identical runs produce identical bytes.
"""
from __future__ import annotations

import json
import math
import os
from typing import Iterable, Sequence

import numpy as np

from .errors import IoFailureError


def jsonable(obj):
    """Recursively strip numpy scalar/array types so json can encode them."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def fmt_value(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


def _write_text(path: str, text: str):
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailureError(f"cannot write {path}: {exc}") from exc


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    rows = list(rows)
    if not rows:
        raise IoFailureError(f"refusing to write empty table {path}")
    lines = [",".join(header)]
    lines += [",".join(fmt_value(x) for x in row) for row in rows]
    _write_text(path, "\n".join(lines) + "\n")
    return path


def write_gnuplot(path: str, axis_names: Sequence[str], rows: Iterable[Sequence]) -> str:
    rows = list(rows)
    if not rows:
        raise IoFailureError(f"refusing to write empty table {path}")
    lines = ["# " + "  ".join(axis_names)]
    lines += ["  ".join(fmt_value(x) for x in row) for row in rows]
    _write_text(path, "\n".join(lines) + "\n")
    return path


def write_json(path: str, payload) -> str:
    if payload is None or payload == {} or payload == []:
        raise IoFailureError(f"refusing to write empty report {path}")
    _write_text(path, json.dumps(jsonable(payload), indent=2, sort_keys=True,
                                 allow_nan=True) + "\n")
    return path


def emit_table(path_base: str, header: Sequence[str], rows: Iterable[Sequence],
               fmt: str) -> str:
    """One table in the requested format; returns the written path."""
    if fmt == "csv":
        return write_csv(path_base + ".csv", header, rows)
    if fmt == "gnuplot-data":
        return write_gnuplot(path_base + ".dat", header, rows)
    if fmt == "json":
        rows = list(rows)
        if not rows:
            raise IoFailureError(f"refusing to write empty table {path_base}")
        payload = [dict(zip(header, row)) for row in rows]
        return write_json(path_base + ".json", payload)
    raise IoFailureError(f"unknown report format {fmt!r}")
