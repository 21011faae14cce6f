"""(epsilon, lambda)-chains.

A chain ``z_0, ..., z_l`` qualifies when every step is strictly shorter than
``epsilon * lambda`` and the steps sum to at most ``lambda``. Along such a
chain a field that is Lipschitz of order ``alpha > 1`` with constant C moves
by at most ``C * epsilon**(alpha - 1) * lambda**alpha``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, PreconditionError, ResourceError, StructuralError
from .lipschitz import LipschitzFit, ScalarField, _as_field, verify_lipschitz
from .metric import REL_TOL, FiniteMetricSpace

MAX_CANTOR_DEPTH = 20
# dense matrices above this many bytes are refused
MAX_MATRIX_BYTES = 1 << 31


@dataclass(frozen=True)
class ChainQuery:
    epsilon: float
    lam: float
    source: int
    target: int

    def __post_init__(self):
        _check_budgets(self.epsilon, self.lam)


@dataclass(frozen=True)
class ChainResult:
    found: bool
    chain: tuple | None
    total_length: float
    max_step: float

    def to_dict(self):
        return {
            "found": self.found,
            "chain": None if self.chain is None else list(self.chain),
            "total_length": self.total_length,
            "max_step": self.max_step,
        }


def _check_budgets(epsilon, lam):
    if not (epsilon > 0 and lam > 0) or math.isinf(epsilon) or math.isinf(lam):
        raise DomainError("epsilon and lambda must be positive and finite")


def _check_index(space, i):
    if not (0 <= i < space.n):
        raise StructuralError(f"point index {i} out of range for {space.n} points")


def path_length(D: np.ndarray, path: Sequence[int]) -> float:
    # left-to-right accumulation, the same order the path search uses
    total = 0.0
    for a, b in zip(path, path[1:]):
        total += float(D[a, b])
    return total


def max_step(D: np.ndarray, path: Sequence[int]) -> float:
    return max((float(D[a, b]) for a, b in zip(path, path[1:])), default=0.0)


def is_chain(space: FiniteMetricSpace, chain: Sequence[int], epsilon: float, lam: float) -> bool:
    if len(chain) == 0:
        raise StructuralError("a chain needs at least one point")
    _check_budgets(epsilon, lam)
    for i in chain:
        _check_index(space, i)
    D = space.dist
    return max_step(D, chain) < epsilon * lam and path_length(D, chain) <= lam


def _shortest(D: np.ndarray, usable: np.ndarray, source: int, target: int):
    """Dijkstra over ``usable`` edges.

    Ties on length go to fewer hops, then to the lexicographically smaller path.
    """
    best = {source: (0.0, 0, (source,))}
    heap = [(0.0, 0, (source,))]
    done = set()
    while heap:
        length, hops, path = heapq.heappop(heap)
        u = path[-1]
        if u in done:
            continue
        done.add(u)
        if u == target:
            return length, path
        for v in np.nonzero(usable[u])[0]:
            v = int(v)
            if v in done:
                continue
            key = (length + float(D[u, v]), hops + 1, path + (v,))
            if v not in best or key < best[v]:
                best[v] = key
                heapq.heappush(heap, key)
    return math.inf, None


def _usable(D, bound, strict):
    usable = D < bound if strict else D <= bound
    np.fill_diagonal(usable, False)
    return usable


def chain_exists(space: FiniteMetricSpace, query: ChainQuery) -> ChainResult:
    """Find a shortest chain from ``query.source`` to ``query.target`` using steps below ``epsilon * lambda``."""
    _check_index(space, query.source)
    _check_index(space, query.target)
    space.require_metric()
    D = space.dist
    length, path = _shortest(
        D, _usable(D, query.epsilon * query.lam, strict=True), query.source, query.target
    )
    if path is None:
        return ChainResult(False, None, math.inf, math.inf)
    step = max_step(D, path)
    if length <= query.lam:
        return ChainResult(True, path, length, step)
    return ChainResult(False, None, length, step)


def min_lambda(space: FiniteMetricSpace, source: int, target: int, epsilon: float) -> tuple[float, bool]:
    """Infimum of the lambdas for which an (epsilon, lambda)-chain joins the two points.

    Sweeps the distinct distances ``w``: edges of weight ``<= w`` become usable
    once ``lambda > w / epsilon``. Returns ``(inf, False)`` when the target is
    unreachable. For ``source == target`` the infimum 0 is not a valid budget,
    so ``(0.0, False)`` is returned.
    """
    _check_index(space, source)
    _check_index(space, target)
    if not epsilon > 0 or math.isinf(epsilon):
        raise DomainError("epsilon must be positive and finite")
    space.require_metric()
    if source == target:
        return 0.0, False
    D = space.dist
    iu = np.triu_indices(space.n, 1)
    best, attained = math.inf, False
    for w in np.unique(D[iu]):
        w = float(w)
        s, path = _shortest(D, _usable(D, w, strict=False), source, target)
        if path is None:
            continue
        floor = w / epsilon
        cand = max(s, floor)
        hit = s > floor
        if cand < best:
            best, attained = cand, hit
        elif cand == best:
            attained = attained or hit
    return best, attained


def oscillation_bound(C: float, alpha: float, epsilon: float, lam: float) -> float:
    if not alpha > 1:
        raise DomainError(f"oscillation bound needs alpha > 1, got {alpha}")
    if C < 0:
        raise DomainError("C must be nonnegative")
    _check_budgets(epsilon, lam)
    return C * epsilon ** (alpha - 1) * lam**alpha


def verify_chain_bound(
    space: FiniteMetricSpace,
    field,
    fit: LipschitzFit,
    chain: Sequence[int],
    epsilon: float,
    lam: float,
    tol: float | None = None,
) -> bool:
    """Check the endpoint oscillation against the telescoped and closed-form bounds.

    Raises PreconditionError (``condition`` "chain" or "lipschitz") when the
    chain does not qualify or the fit does not hold. ``tol`` defaults to
    ``REL_TOL * bound``.
    """
    field = _as_field(field)
    if not fit.alpha > 1:
        raise DomainError(f"oscillation bound needs alpha > 1, got {fit.alpha}")
    if not is_chain(space, chain, epsilon, lam):
        raise PreconditionError(
            f"not an ({epsilon}, {lam})-chain: {list(chain)}", condition="chain"
        )
    if verify_lipschitz(space, field, fit.alpha, fit.constant):
        raise PreconditionError(
            f"field is not Lipschitz of order {fit.alpha} with constant {fit.constant}",
            condition="lipschitz",
        )
    bound = oscillation_bound(fit.constant, fit.alpha, epsilon, lam)
    if tol is None:
        tol = REL_TOL * bound
    Dpow = space.powered(fit.alpha)
    f = field.values
    swing = abs(f[chain[0]] - f[chain[-1]])
    telescoped = sum(fit.constant * float(Dpow[a, b]) for a, b in zip(chain, chain[1:]))
    return bool(swing <= telescoped + tol and swing <= bound + tol)


def cantor_space(depth: int, ratio: float) -> FiniteMetricSpace:
    """Left endpoints of the ``2**depth`` intervals of a Cantor construction on [0, 1].

    Each step keeps the outer pieces of relative length ``ratio``. Labels are
    binary addresses ("0" = left piece), so fields defined by address prefix
    are locally constant.
    """
    if depth < 1:
        raise DomainError("depth must be at least 1")
    if depth > MAX_CANTOR_DEPTH:
        raise ResourceError(f"depth {depth} exceeds the limit of {MAX_CANTOR_DEPTH}")
    if not 0 < ratio < 0.5:
        raise DomainError(f"ratio must lie in (0, 1/2), got {ratio}")
    if 8 * 4**depth > MAX_MATRIX_BYTES:
        raise ResourceError(f"depth {depth} needs a {2**depth}-point distance matrix")
    lefts = np.zeros(1)
    length = 1.0
    for _ in range(depth):
        lefts = np.column_stack([lefts, lefts + (1.0 - ratio) * length]).ravel()
        length *= ratio
    labels = [format(k, f"0{depth}b") for k in range(2**depth)]
    return FiniteMetricSpace(np.abs(lefts[:, None] - lefts[None, :]), labels)


def cantor_points(space: FiniteMetricSpace) -> np.ndarray:
    """Recover the coordinates of a :func:`cantor_space` (distance from the point at 0)."""
    return np.array(space.dist[0])


def prefix_indicator(space: FiniteMetricSpace, prefix: str) -> ScalarField:
    """1 on points whose address starts with ``prefix``, else 0."""
    return ScalarField([1.0 if str(lab).startswith(prefix) else 0.0 for lab in space.labels])
