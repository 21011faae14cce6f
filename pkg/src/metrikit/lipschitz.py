"""Lipschitz constants of order alpha for scalar fields on finite spaces.

The working condition is ``|f(x) - f(y)| <= C * d(x, y) ** alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, InvalidDataError, StructuralError
from .metric import REL_TOL, FiniteMetricSpace


@dataclass(frozen=True, eq=False)
class ScalarField:
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if not np.isfinite(vals).all():
            raise InvalidDataError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.shape[0]

    def __getitem__(self, i):
        return self.values[i]


@dataclass(frozen=True)
class LipschitzFit:
    alpha: float
    constant: float
    witness: tuple | None

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "constant": self.constant,
            "witness": None if self.witness is None else list(self.witness),
        }


def _as_field(field) -> ScalarField:
    return field if isinstance(field, ScalarField) else ScalarField(field)


def _check(space: FiniteMetricSpace, field, alpha: float) -> ScalarField:
    if not alpha > 0 or math.isinf(alpha):
        raise DomainError(f"order alpha must be positive, got {alpha}")
    field = _as_field(field)
    if len(field) != space.n:
        raise StructuralError(f"field has {len(field)} values for {space.n} points")
    space.require_metric()
    return field


def _pair_terms(space, field, alpha):
    iu = np.triu_indices(space.n, 1)
    f = field.values
    diff = np.abs(f[iu[0]] - f[iu[1]])
    dpow = space.powered(alpha)[iu]
    return iu, diff, dpow


def fit_constant(space: FiniteMetricSpace, field, alpha: float) -> LipschitzFit:
    """Smallest C such that the field is Lipschitz of order ``alpha``.

    The witness is the lexicographically smallest pair attaining the maximum.
    A one-point space has constant 0 and no witness.
    """
    field = _check(space, field, alpha)
    if space.n < 2:
        return LipschitzFit(alpha, 0.0, None)
    iu, diff, dpow = _pair_terms(space, field, alpha)
    ratio = diff / dpow
    k = int(np.argmax(ratio))  # first maximum in row-major order of the upper triangle
    return LipschitzFit(alpha, float(ratio[k]), (int(iu[0][k]), int(iu[1][k])))


def verify_lipschitz(space, field, alpha: float, C: float, tol: float = 0.0) -> list[tuple]:
    """Pairs ``(i, j, defect)`` breaking the order-``alpha`` bound with constant ``C``.

    A pair fails when its excess tops ``tol`` plus ``REL_TOL`` times the
    allowed difference. Sorted by defect, largest first.
    """
    if C < 0 or tol < 0:
        raise DomainError("C and tol must be nonnegative")
    field = _check(space, field, alpha)
    if space.n < 2:
        return []
    iu, diff, dpow = _pair_terms(space, field, alpha)
    allowed = C * dpow
    excess = diff - allowed
    # relative slack so a fitted constant never flags its own witness through rounding
    bad = np.nonzero(excess > tol + REL_TOL * allowed)[0]
    out = [(int(iu[0][k]), int(iu[1][k]), float(excess[k])) for k in bad]
    out.sort(key=lambda t: (-t[2], t[0], t[1]))
    return out


def distance_field(space: FiniteMetricSpace, anchors: Sequence[int]) -> ScalarField:
    """Distance from every point to the nearest anchor."""
    anchors = sorted(set(int(a) for a in anchors))
    if not anchors:
        raise DomainError("anchor set must be nonempty")
    if anchors[0] < 0 or anchors[-1] >= space.n:
        raise StructuralError("anchor index out of range")
    return ScalarField(space.dist[:, anchors].min(axis=1))


def uniform_grid(a: float, b: float, h: float) -> np.ndarray:
    steps = (b - a) / h
    m = round(steps)
    if m < 1 or abs(steps - m) > 1e-9 * max(1.0, steps):
        raise DomainError(f"mesh {h} does not divide [{a}, {b}]")
    return a + h * np.arange(m + 1)


def refinement_probe(
    a: float,
    b: float,
    f: Callable[[np.ndarray], np.ndarray],
    meshes: Sequence[float],
    alpha: float,
) -> list[tuple[float, float]]:
    """Fit the order-``alpha`` constant of ``f`` on ever finer uniform grids of [a, b].

    For ``alpha > 1`` and nonconstant ``f`` the fitted constant blows up as the
    mesh shrinks, the finite shadow of such functions being constant.
    Returns ``(h, C(h))`` pairs in the given order.
    """
    if not meshes:
        raise DomainError("at least one mesh size is required")
    if not alpha > 1:
        raise DomainError(f"refinement probe needs alpha > 1, got {alpha}")
    if not b > a:
        raise DomainError("interval must satisfy a < b")
    if any(h2 >= h1 for h1, h2 in zip(meshes, meshes[1:])):
        raise DomainError("mesh sizes must be strictly decreasing")
    out = []
    for h in meshes:
        xs = uniform_grid(a, b, h)
        space = FiniteMetricSpace(np.abs(xs[:, None] - xs[None, :]))
        vals = np.asarray(f(xs), dtype=float)
        out.append((float(h), fit_constant(space, vals, alpha).constant))
    return out
