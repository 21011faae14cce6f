"""Porosity and covering counts for sets given as occupancy grids on [0, 1]^n."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import ndimage

from .errors import DomainError, ResolutionError, StructuralError
from .metric import REL_TOL


@dataclass(frozen=True, eq=False)
class GridSet:
    """A union of grid cells of side ``1 / resolution`` in the unit cube."""

    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask).astype(bool)
        if mask.ndim < 1 or len(set(mask.shape)) != 1 or mask.shape[0] < 1:
            raise StructuralError(f"mask must be a hypercube array, got shape {mask.shape}")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @property
    def n(self) -> int:
        return self.mask.ndim

    @property
    def resolution(self) -> int:
        return self.mask.shape[0]

    @property
    def cell_size(self) -> float:
        return 1.0 / self.resolution

    @classmethod
    def empty(cls, n: int, resolution: int) -> GridSet:
        return cls(np.zeros((resolution,) * n, dtype=bool))

    @classmethod
    def full(cls, n: int, resolution: int) -> GridSet:
        return cls(np.ones((resolution,) * n, dtype=bool))


@dataclass(frozen=True)
class Cube:
    """The aligned cube of side ``L**-level`` with integer position ``index`` per axis."""

    level: int
    index: tuple


@dataclass(frozen=True)
class PorosityReport:
    porous: bool
    constant: float
    best_constant: float
    failures: tuple = field(default_factory=tuple)

    def to_dict(self):
        return {
            "porous": self.porous,
            "constant": self.constant,
            "best_constant": self.best_constant,
            "failures": [{"cell": list(c), "radius": r} for c, r in self.failures],
        }


@dataclass(frozen=True)
class CoverRecord:
    L: int
    k: int
    count: int
    bound: int

    def to_dict(self):
        return {"L": self.L, "k": self.k, "count": self.count, "bound": self.bound}


def _ball_footprint(radius_cells: float, n: int) -> np.ndarray:
    R = int(math.floor(radius_cells + 1e-12))
    axes = np.meshgrid(*([np.arange(-R, R + 1)] * n), indexing="ij")
    sq = sum(a * a for a in axes)
    return sq <= radius_cells * radius_cells * (1 + 1e-12)


def porosity_probe(gset: GridSet, C: float, radii: Sequence[float]) -> PorosityReport:
    """Check the ball form of porosity at cell centres.

    For each cell centre x and radius r, look for a cell centre y with
    ``|x - y| <= r`` whose distance to the occupied cell centres is at least
    ``r / C``. The best y is taken, so ``best_constant`` is the smallest C that
    would have passed at the probed radii.
    """
    if not C >= 1:
        raise DomainError(f"porosity constant must be >= 1, got {C}")
    if not len(radii):
        raise DomainError("at least one radius is required")
    c = gset.cell_size
    for r in radii:
        if not r > c:
            raise ResolutionError(f"radius {r} is not above the cell size {c}")
        if r > 1:
            raise DomainError(f"radius {r} exceeds the unit cube scale")

    mask = gset.mask
    if not mask.any():
        return PorosityReport(True, float(C), 0.0, ())
    to_set = ndimage.distance_transform_edt(~mask) * c
    failures = []
    best_constant = 0.0
    for r in radii:
        best = ndimage.maximum_filter(
            to_set, footprint=_ball_footprint(r / c, gset.n), mode="constant", cval=-1.0
        )
        need = r / C
        for cell in np.argwhere(best < need * (1 - REL_TOL)):
            failures.append((tuple(int(i) for i in cell), float(r)))
        worst = float(best.min())
        best_constant = max(best_constant, math.inf if worst == 0 else r / worst)
    return PorosityReport(not failures, float(C), best_constant, tuple(failures))


def _check_arity(L):
    if int(L) != L or L < 2:
        raise DomainError(f"subdivision arity must be an integer >= 2, got {L}")
    return int(L)


def occupancy(gset: GridSet, cubes_per_side: int) -> np.ndarray:
    """Which of the ``cubes_per_side ** n`` aligned cubes meet the set."""
    res = gset.resolution
    if res % cubes_per_side:
        raise ResolutionError(f"resolution {res} is not divisible by {cubes_per_side}")
    b = res // cubes_per_side
    shape = []
    for _ in range(gset.n):
        shape += [cubes_per_side, b]
    blocks = gset.mask.reshape(shape)
    return blocks.any(axis=tuple(range(1, 2 * gset.n, 2)))


def subcube_witness(gset: GridSet, L: int, cube: Cube) -> int | None:
    """Row-major index of the first empty child of ``cube``, or None if every child meets the set."""
    L = _check_arity(L)
    res = gset.resolution
    m = L**cube.level
    if res % m or (res // m) % L:
        raise StructuralError(
            f"a level-{cube.level} cube at resolution {res} cannot be split into {L} per side"
        )
    if len(cube.index) != gset.n or not all(0 <= i < m for i in cube.index):
        raise StructuralError(f"cube index {cube.index} out of range")
    side = res // m
    sl = tuple(slice(i * side, (i + 1) * side) for i in cube.index)
    children = occupancy(GridSet(gset.mask[sl]), L)
    empty = np.argwhere(~children)
    if not len(empty):
        return None
    return int(np.ravel_multi_index(tuple(empty[0]), children.shape))


def _depth(res: int, L: int) -> int:
    K, m = 0, 1
    while m < res:
        m *= L
        K += 1
    if m != res or K < 1:
        raise StructuralError(f"resolution {res} is not a positive power of {L}")
    return K


def porous_by_subdivision(gset: GridSet, L: int) -> bool:
    """True iff every aligned L-adic cube above cell scale has an empty child."""
    L = _check_arity(L)
    K = _depth(gset.resolution, L)
    n = gset.n
    for j in range(K):
        occ = occupancy(gset, L ** (j + 1))
        shape = []
        for _ in range(n):
            shape += [L**j, L]
        all_full = occ.reshape(shape).all(axis=tuple(range(1, 2 * n, 2)))
        if all_full.any():
            return False
    return True


def covering_count(gset: GridSet, L: int, k: int) -> CoverRecord:
    """Number of level-k L-adic cubes meeting the set, with the porous bound ``(L**n - 1)**k``."""
    L = _check_arity(L)
    if k < 0:
        raise DomainError("depth must be nonnegative")
    if L**k > gset.resolution:
        raise ResolutionError(f"depth {k} is finer than resolution {gset.resolution}")
    count = int(occupancy(gset, L**k).sum())
    return CoverRecord(L, k, count, (L**gset.n - 1) ** k)


def dimension_upper_bound(L: int, n: int) -> float:
    L = _check_arity(L)
    if n < 1:
        raise DomainError("dimension must be at least 1")
    return math.log(L**n - 1) / math.log(L)


def box_dimension_estimate(gset: GridSet, L: int, k_max: int) -> tuple[float, list[CoverRecord]]:
    """Least-squares slope of ``log count_k`` against ``k log L`` for k = 1..k_max."""
    L = _check_arity(L)
    if k_max < 2:
        raise DomainError("need k_max >= 2 for a slope")
    records = [covering_count(gset, L, k) for k in range(1, k_max + 1)]
    usable = [r for r in records if r.count > 0]
    if len(usable) < 2:
        raise DomainError("fewer than two depths with a nonempty cover")
    x = np.array([r.k * math.log(L) for r in usable])
    y = np.array([math.log(r.count) for r in usable])
    dx = x - x.mean()
    slope = float(np.dot(dx, y - y.mean()) / np.dot(dx, dx))
    return slope, records


def cantor_mask(depth: int, n: int = 1) -> GridSet:
    """Product of middle-thirds Cantor stages at resolution ``3**depth``."""
    if depth < 1:
        raise DomainError("depth must be at least 1")
    idx = np.arange(3**depth)
    keep = np.ones(idx.shape, dtype=bool)
    rest = idx.copy()
    for _ in range(depth):
        keep &= rest % 3 != 1
        rest //= 3
    mask = keep
    for _ in range(n - 1):
        mask = np.multiply.outer(mask, keep)
    return GridSet(mask)
