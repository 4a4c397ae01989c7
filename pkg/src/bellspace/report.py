"""Deterministic JSON and CSV writers.

Floats are written with 17 significant digits and keys in insertion order,
so equal results give byte-equal files.  Non-finite floats become ``null``.
"""

import json
import math
from fractions import Fraction

import numpy as np


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if text == "-0":
        text = "0"
    return text


def _encode(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj))
    elif isinstance(obj, Fraction):
        out.append(json.dumps(str(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, np.ndarray):
        _encode(obj.tolist(), indent, level, out)
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for k, (key, value) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(key))}: ")
            _encode(value, indent, level + 1, out)
            out.append(",\n" if k < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            parts = []
            for v in obj:
                _encode(v, indent, level + 1, parts)
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for k, value in enumerate(obj):
            out.append(pad)
            _encode(value, indent, level + 1, out)
            out.append(",\n" if k < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent=2) -> str:
    out = []
    _encode(obj, indent, 0, out)
    return "".join(out) + "\n"


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for v in row:
                if v is None:
                    cells.append("")
                elif isinstance(v, bool):
                    cells.append("true" if v else "false")
                elif isinstance(v, float):
                    cells.append(format_float(v))
                else:
                    cells.append(str(v))
            fh.write(",".join(cells) + "\n")
