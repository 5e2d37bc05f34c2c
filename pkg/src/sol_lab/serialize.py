"""Deterministic JSON and CSV writers.

Doubles are written with 17 significant digits so that every value
round-trips; dictionaries keep insertion order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .exactnum import QuadRat
from .lattice import ExactSolPoint
from .solcore import SolPoint, TangentVector

__all__ = ["fmt_float", "dumps", "point_to_json", "point_from_json", "write_csv"]


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x + 0.0, ".17g")


def _encode(obj: Any, out: list[str]) -> None:
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append("null" if obj is None else ("true" if obj else "false"))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, Fraction):
        out.append(json.dumps(str(obj)))
    elif isinstance(obj, QuadRat):
        _encode(obj.to_json(), out)
    elif isinstance(obj, (SolPoint, TangentVector)):
        _encode(list(obj), out)
    elif isinstance(obj, dict):
        out.append("{")
        for k, (key, val) in enumerate(obj.items()):
            if k:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _encode(val, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for k, val in enumerate(obj):
            if k:
                out.append(", ")
            _encode(val, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    out: list[str] = []
    _encode(obj, out)
    return "".join(out) + "\n"


def point_to_json(p) -> Any:
    """SolPoint as [x, y, z] decimal strings; ExactSolPoint as an object."""
    if isinstance(p, ExactSolPoint):
        return {"x": p.x.to_json(), "y": p.y.to_json(), "zeta": format(p.zeta, ".17g"), "r": p.r}
    return [format(float(c), ".17g") for c in p]


def point_from_json(obj, lam: QuadRat | None = None):
    if isinstance(obj, dict):
        if lam is None:
            raise ValueError("exact points need the lattice eigenvalue")
        return ExactSolPoint(
            QuadRat.from_json(obj["x"]), QuadRat.from_json(obj["y"]), float(obj.get("zeta", 0.0)), int(obj["r"]), lam
        )
    return SolPoint.from_seq([float(c) for c in obj])


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], stream=None) -> str:
    buf = stream if stream is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
    return buf.getvalue() if stream is None else ""
