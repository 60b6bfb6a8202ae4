"""Deterministic JSON/CSV writers.

Floats are written with 17 significant digits so every double round-trips
exactly; output bytes depend only on the values, never on platform repr.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def fmt_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def matrix_to_json(m) -> list:
    """Row-major list of ``[re, im]`` pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def _encode(obj, indent, level) -> str:
    pad = " " * (indent * (level + 1)) if indent else ""
    end = " " * (indent * level) if indent else ""
    nl = "\n" if indent else ""
    sep = "," + nl if indent else ","
    if obj is None or obj is True or obj is False:
        return json.dumps(obj)
    if isinstance(obj, (bool, np.bool_)):
        return json.dumps(bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items())
        return "{" + nl + sep.join(items) + nl + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        # numeric leaves stay on one line to keep matrices readable
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, 0, 0) for v in obj) + "]"
        items = (pad + _encode(v, indent, level + 1) for v in obj)
        return "[" + nl + sep.join(items) + nl + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "" if not math.isfinite(v) else fmt_float(v)
    return str(v)


def load_schema(name: str) -> dict:
    """JSON schema shipped for a command's output (``phase``, ``sweep``, ...)."""
    from importlib.resources import files

    text = files("qdexciton").joinpath("schemas", f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)
