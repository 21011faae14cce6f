"""Readers for spaces, fields and masks, and the JSON writer used by the CLI."""

from __future__ import annotations

import csv
import json
import math
import re
from pathlib import Path

import numpy as np

from .errors import DomainError, ParseError, StructuralError
from .lipschitz import ScalarField
from .metric import FiniteMetricSpace
from .porosity import GridSet

METRICS = ("euclidean", "manhattan", "rug", "precomputed")


def read_rows(path) -> list[list[float]]:
    """Numeric CSV rows; blank lines and ``#`` comments are skipped."""
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row]
            if not any(cells) or cells[0].startswith("#"):
                continue
            try:
                values = [float(c) for c in cells]
            except ValueError:
                raise ParseError(f"non-numeric entry in {row!r}", line=lineno) from None
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ParseError(f"expected {width} columns, got {len(values)}", line=lineno)
            rows.append(values)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return rows


def load_points(path) -> np.ndarray:
    return np.array(read_rows(path), dtype=float)


def load_space(path, metric: str = "euclidean") -> FiniteMetricSpace:
    """Load a space and attach its metric report.

    Violations are reported through ``space.report``; nothing is repaired.
    """
    if metric not in METRICS:
        raise DomainError(f"metric must be one of {METRICS}, got {metric!r}")
    data = load_points(path)
    if metric == "precomputed":
        if data.shape[0] != data.shape[1]:
            raise StructuralError(f"precomputed matrix is {data.shape[0]}x{data.shape[1]}")
        space = FiniteMetricSpace(data)
    else:
        if metric == "rug" and data.shape[1] != 2:
            raise StructuralError("rug metric needs 2-column points")
        space = FiniteMetricSpace.from_points(data, metric)
    space.report  # computed once and cached on the space
    return space


def load_field(path) -> ScalarField:
    data = load_points(path)
    if data.shape[1] != 1:
        raise ParseError("field files hold one value per row")
    return ScalarField(data[:, 0])


def load_mask(path) -> GridSet:
    """Read ``n resolution`` followed by ``resolution**n`` 0/1 cells in row-major order."""
    tokens = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0]
            tokens.extend((lineno, t) for t in re.split(r"[\s,]+", line) if t)
    if len(tokens) < 2:
        raise ParseError(f"{path}: missing 'n resolution' header")
    try:
        n, res = int(tokens[0][1]), int(tokens[1][1])
    except ValueError:
        raise ParseError("header must be two integers", line=tokens[0][0]) from None
    if n < 1 or res < 1:
        raise ParseError("header values must be positive", line=tokens[0][0])
    cells = tokens[2:]
    if len(cells) != res**n:
        raise ParseError(f"expected {res ** n} cells, got {len(cells)}")
    bits = []
    for lineno, t in cells:
        if t not in ("0", "1"):
            raise ParseError(f"cell value {t!r} is not 0 or 1", line=lineno)
        bits.append(t == "1")
    return GridSet(np.array(bits, dtype=bool).reshape((res,) * n))


def dump_mask(gset: GridSet, path) -> None:
    lines = [f"{gset.n} {gset.resolution}"]
    flat = gset.mask.reshape(-1, gset.resolution).astype(int)
    lines.extend(" ".join(map(str, row)) for row in flat)
    Path(path).write_text("\n".join(lines) + "\n")


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """Serialize with 17 significant digits per float; non-finite floats become strings."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if hasattr(obj, "to_dict"):
        return to_json(obj.to_dict(), indent, _level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
