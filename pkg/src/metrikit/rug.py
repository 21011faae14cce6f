"""The parabolic plane: distance ``|x1 - y1| + |x2 - y2| ** 0.5``.

It is homogeneous of degree one under ``(x1, x2) -> (r x1, r**2 x2)``, and
metric balls have Lebesgue measure ``(4/3) t**3``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, InvalidDataError, PreconditionError
from .lipschitz import ScalarField, fit_constant
from .metric import FiniteMetricSpace

BALL_CONSTANT = 4.0 / 3.0
MIN_SAMPLES = 1000
# Sampling is split in fixed-size shards so results never depend on the worker count.
SHARD_SIZE = 1 << 16


@dataclass(frozen=True)
class RugPoint:
    x1: float
    x2: float

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise InvalidDataError("rug point coordinates must be finite")

    def __add__(self, other: RugPoint) -> RugPoint:
        return RugPoint(self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: RugPoint) -> RugPoint:
        return RugPoint(self.x1 - other.x1, self.x2 - other.x2)


def rug_norm(p: RugPoint) -> float:
    return abs(p.x1) + math.sqrt(abs(p.x2))


def rug_distance(p: RugPoint, q: RugPoint) -> float:
    return rug_norm(p - q)


def dilate(p: RugPoint, r: float) -> RugPoint:
    if not r > 0 or math.isinf(r):
        raise DomainError(f"dilation scale must be positive, got {r}")
    return RugPoint(r * p.x1, r * r * p.x2)


def rug_distance_matrix(points) -> np.ndarray:
    """Pairwise rug distances for an ``(m, 2)`` array or a list of RugPoint."""
    pts = _coords(points)
    d1 = np.abs(pts[:, 0][:, None] - pts[:, 0][None, :])
    d2 = np.abs(pts[:, 1][:, None] - pts[:, 1][None, :])
    return d1 + np.sqrt(d2)


def rug_space(points) -> FiniteMetricSpace:
    return FiniteMetricSpace(rug_distance_matrix(points))


def _coords(points) -> np.ndarray:
    if len(points) and isinstance(points[0], RugPoint):
        return np.array([[p.x1, p.x2] for p in points], dtype=float)
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidDataError(f"rug points need two coordinates, got shape {pts.shape}")
    return pts


def worker_count() -> int:
    raw = os.environ.get("METRIKIT_THREADS")
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _count_inside(seed_seq, size, t):
    rng = np.random.default_rng(seed_seq)
    u = rng.uniform(-t, t, size)
    v = rng.uniform(-t * t, t * t, size)
    return int(np.count_nonzero(np.abs(u) + np.sqrt(np.abs(v)) < t))


def ball_measure(t: float, samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo area of ``{p : rug_norm(p) < t}`` with its standard error.

    Rejection sampling over the bounding box ``[-t, t] x [-t**2, t**2]``,
    whose area is ``4 t**3``; the acceptance rate is 1/3 at every scale.
    """
    if not t > 0 or math.isinf(t):
        raise DomainError(f"radius must be positive, got {t}")
    if samples < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    sizes = [SHARD_SIZE] * (samples // SHARD_SIZE)
    if samples % SHARD_SIZE:
        sizes.append(samples % SHARD_SIZE)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    workers = min(worker_count(), len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(lambda a: _count_inside(a[0], a[1], t), zip(seqs, sizes)))
    else:
        hits = sum(_count_inside(s, n, t) for s, n in zip(seqs, sizes))
    box = 4.0 * t**3
    p = hits / samples
    return box * p, box * math.sqrt(p * (1.0 - p) / samples)


def vertical_field(g: Callable[[np.ndarray], np.ndarray], beta: float, points) -> ScalarField:
    """The field ``p -> g(x2)``, constant along the first coordinate.

    If ``g`` is Lipschitz of order ``beta <= 1`` with constant K for the usual
    distance on the line, the field is Lipschitz of order ``2 beta`` with the
    same K for the rug distance.
    """
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    pts = _coords(points)
    vals = np.asarray(g(pts[:, 1]), dtype=float).reshape(-1)
    if beta > 1 and np.ptp(vals) > 0:
        raise PreconditionError(
            "a nonconstant g cannot be Lipschitz of order beta > 1", condition="beta"
        )
    return ScalarField(vals)


def rug_grid(h: float, cells: int = 4) -> np.ndarray:
    """``(cells + 1)**2`` points with spacing ``h`` horizontally and ``h**2`` vertically."""
    if not h > 0:
        raise DomainError("mesh must be positive")
    if cells < 1:
        raise DomainError("need at least one cell per side")
    k = np.arange(cells + 1, dtype=float)
    x1, x2 = np.meshgrid(h * k, h * h * k, indexing="ij")
    return np.column_stack([x1.ravel(), x2.ravel()])


def order_probe(
    component: int, alpha: float, meshes: Sequence[float], cells: int = 4
) -> list[tuple[float, float]]:
    """Fitted order-``alpha`` constant of a coordinate function on rug grids of shrinking mesh."""
    if component not in (1, 2):
        raise DomainError("component must be 1 or 2")
    if not meshes:
        raise DomainError("at least one mesh size is required")
    out = []
    for h in meshes:
        pts = rug_grid(h, cells)
        out.append((float(h), fit_constant(rug_space(pts), pts[:, component - 1], alpha).constant))
    return out
