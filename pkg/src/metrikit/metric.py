"""Finite metric spaces: axiom checks, power transforms and distortion."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateInputError,
    DomainError,
    InvalidDataError,
    PreconditionError,
    StructuralError,
)

# Relative slack applied to every axiom comparison.
REL_TOL = 1e-9

METRIC_KINDS = ("nonneg", "identity", "symmetry", "triangle")


def _square(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise StructuralError(f"distance matrix must be square, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Labelled points with a dense distance matrix.

    Distances are kept as ``base ** exponent``. A snowflake transform only
    multiplies the exponent, so order-``alpha`` computations on a transformed
    space evaluate ``base ** (exponent * alpha)`` and agree bit-for-bit with
    the equivalent order on the original space.

    Nothing is validated beyond shape; use :func:`verify_metric`.
    """

    base: np.ndarray
    labels: tuple = ()
    exponent: float = 1.0

    def __post_init__(self):
        base = _square(self.base)
        base.setflags(write=False)
        object.__setattr__(self, "base", base)
        labels = tuple(self.labels) if len(self.labels) else tuple(range(base.shape[0]))
        if len(labels) != base.shape[0]:
            raise StructuralError(
                f"{len(labels)} labels for a {base.shape[0]}-point matrix"
            )
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "exponent", float(self.exponent))

    @classmethod
    def from_points(cls, points, metric="euclidean", labels=()) -> FiniteMetricSpace:
        """Induce a space from a point cloud (one point per row)."""
        from scipy.spatial.distance import cdist

        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if metric == "euclidean":
            dist = cdist(pts, pts, "euclidean")
        elif metric == "manhattan":
            dist = cdist(pts, pts, "cityblock")
        elif metric == "rug":
            from .rug import rug_distance_matrix

            dist = rug_distance_matrix(pts)
        else:
            raise DomainError(f"unknown point metric {metric!r}")
        return cls(dist, labels)

    @property
    def n(self) -> int:
        return self.base.shape[0]

    def __len__(self):
        return self.n

    @cached_property
    def dist(self) -> np.ndarray:
        out = self.powered(1.0)
        out.setflags(write=False)
        return out

    def powered(self, alpha: float) -> np.ndarray:
        """Distances raised to ``alpha`` (fresh array)."""
        e = self.exponent * alpha
        if e == 1.0:
            return np.array(self.base)
        return np.power(self.base, e)

    @cached_property
    def report(self) -> MetricReport:
        """Cached zero-tolerance metric check."""
        return verify_metric(self, 0.0)

    def require_metric(self):
        if not self.report.is_metric:
            first = next(v for v in self.report.violations if v.kind in METRIC_KINDS)
            raise PreconditionError(
                f"space is not a metric ({first.kind} violation at {first.witness})",
                condition="metric",
            )

    def index(self, label) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: tuple
    defect: float

    def to_dict(self):
        return {"kind": self.kind, "witness": list(self.witness), "defect": self.defect}


@dataclass(frozen=True)
class MetricReport:
    is_metric: bool
    is_ultrametric: bool
    violations: tuple = field(default_factory=tuple)

    def of_kind(self, kind: str) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def to_dict(self):
        return {
            "is_metric": self.is_metric,
            "is_ultrametric": self.is_ultrametric,
            "violations": [v.to_dict() for v in self.violations],
        }


def _matrix_of(space) -> np.ndarray:
    if isinstance(space, FiniteMetricSpace):
        D = space.dist
    else:
        D = _square(space)
    if np.isnan(D).any():
        i, j = np.argwhere(np.isnan(D))[0]
        raise InvalidDataError(f"NaN distance at ({i}, {j})")
    return D


def _exceeds(lhs, rhs, tol):
    return lhs > rhs + tol + REL_TOL * np.maximum(np.abs(lhs), np.abs(rhs))


def _triples(D, tol, ultra):
    n = D.shape[0]
    found = []
    idx = np.arange(n)
    for y in range(n):
        if ultra:
            rhs = np.maximum(D[:, y][:, None], D[y, :][None, :])
        else:
            rhs = D[:, y][:, None] + D[y, :][None, :]
        bad = _exceeds(D, rhs, tol)
        bad[idx, idx] = False
        bad[y, :] = False
        bad[:, y] = False
        for x, z in np.argwhere(bad):
            found.append(((int(x), y, int(z)), float(D[x, z] - rhs[x, z])))
    found.sort()
    kind = "ultra" if ultra else "triangle"
    return [Violation(kind, w, d) for w, d in found]


def _scan(space, tol: float, list_ultra: bool) -> MetricReport:
    if tol < 0 or math.isnan(tol):
        raise DomainError("tolerance must be nonnegative")
    D = _matrix_of(space)
    n = D.shape[0]
    out: list[Violation] = []

    for i, j in np.argwhere(D < -tol):
        out.append(Violation("nonneg", (int(i), int(j)), float(-D[i, j])))
    for i in range(n):
        if abs(D[i, i]) > tol:
            out.append(Violation("identity", (i, i), float(abs(D[i, i]))))
    off = ~np.eye(n, dtype=bool)
    for i, j in np.argwhere((D == 0) & off):
        out.append(Violation("identity", (int(i), int(j)), 0.0))
    iu = np.triu_indices(n, 1)
    asym = np.abs(D - D.T)
    sym_bad = asym[iu] > tol + REL_TOL * np.maximum(np.abs(D), np.abs(D.T))[iu]
    for i, j in zip(iu[0][sym_bad], iu[1][sym_bad]):
        out.append(Violation("symmetry", (int(i), int(j)), float(asym[i, j])))
    out.extend(_triples(D, tol, ultra=False))

    is_metric = not out
    ultra = _triples(D, tol, ultra=True)
    if list_ultra:
        out.extend(ultra)
    return MetricReport(is_metric, is_metric and not ultra, tuple(out))


def verify_metric(space, tol: float = 0.0) -> MetricReport:
    """Check nonnegativity, identity, symmetry and every triangle inequality.

    Triangle witnesses are ordered triples ``(x, y, z)`` with
    ``d(x, z) > d(x, y) + d(y, z)``; the defect is the excess.
    ``is_ultrametric`` is evaluated too but ultra violations are not listed.
    """
    return _scan(space, tol, list_ultra=False)


def verify_ultrametric(space, tol: float = 0.0) -> MetricReport:
    """As :func:`verify_metric`, also listing every ``d(x,z) > max(d(x,y), d(y,z))``."""
    return _scan(space, tol, list_ultra=True)


def snowflake(space: FiniteMetricSpace, q: float) -> FiniteMetricSpace:
    """Return the space with distances ``d ** q``."""
    if not q > 0 or math.isinf(q):
        raise DomainError(f"snowflake exponent must be positive and finite, got {q}")
    return FiniteMetricSpace(space.base, space.labels, space.exponent * q)


def qsum(a: float, b: float, q: float) -> float:
    """``(a**q + b**q) ** (1/q)`` for ``a, b >= 0`` and ``q > 0``."""
    if a < 0 or b < 0 or math.isnan(a) or math.isnan(b):
        raise DomainError("qsum arguments must be nonnegative")
    if not q > 0:
        raise DomainError(f"qsum exponent must be positive, got {q}")
    m = max(a, b)
    if m == 0:
        return 0.0
    if math.isinf(m):
        return math.inf
    # factoring out the max avoids overflow for small q
    return m * ((a / m) ** q + (b / m) ** q) ** (1.0 / q)


@dataclass(frozen=True)
class Correspondence:
    """A bijection between the index sets of two spaces, as ``(i, j)`` pairs."""

    pairs: tuple

    @classmethod
    def identity(cls, n: int) -> Correspondence:
        return cls(tuple((i, i) for i in range(n)))

    @classmethod
    def from_sequence(cls, images: Sequence[int]) -> Correspondence:
        return cls(tuple((i, int(j)) for i, j in enumerate(images)))

    def as_permutation(self, n1: int, n2: int) -> np.ndarray:
        if n1 != n2 or len(self.pairs) != n1:
            raise StructuralError(
                f"correspondence with {len(self.pairs)} pairs cannot biject {n1} onto {n2} points"
            )
        perm = np.full(n1, -1, dtype=int)
        hit = np.zeros(n2, dtype=bool)
        for i, j in self.pairs:
            if not (0 <= i < n1 and 0 <= j < n2):
                raise StructuralError(f"pair ({i}, {j}) out of range")
            if perm[i] >= 0 or hit[j]:
                raise StructuralError(f"pair ({i}, {j}) breaks injectivity")
            perm[i] = j
            hit[j] = True
        return perm


def distortion(space1: FiniteMetricSpace, space2: FiniteMetricSpace, corr: Correspondence) -> float:
    """Least ``C >= 1`` with ``d1/C <= d2(phi x, phi y) <= C d1`` over all pairs.

    Equals 1 exactly when ``corr`` is an isometry.
    """
    perm = corr.as_permutation(space1.n, space2.n)
    if space1.n < 2:
        raise DegenerateInputError("distortion needs at least two points")
    space1.require_metric()
    space2.require_metric()
    D1 = space1.dist
    D2 = space2.dist[np.ix_(perm, perm)]
    iu = np.triu_indices(space1.n, 1)
    d1, d2 = D1[iu], D2[iu]
    return float(max(1.0, np.max(np.maximum(d2 / d1, d1 / d2))))
