import itertools

import numpy as np
import pytest
from scipy.cluster.hierarchy import cophenet, linkage
from scipy.sparse.csgraph import shortest_path
from scipy.spatial.distance import pdist, squareform

from metrikit import FiniteMetricSpace, GridSet


def line_space(xs):
    xs = np.asarray(xs, dtype=float)
    return FiniteMetricSpace(np.abs(xs[:, None] - xs[None, :]))


def random_metric(rng, n):
    """Either a Euclidean point cloud or a shortest-path metric on a random weighted graph."""
    if rng.random() < 0.5:
        pts = rng.normal(size=(n, int(rng.integers(1, 4))))
        return FiniteMetricSpace(squareform(pdist(pts)))
    w = rng.uniform(0.1, 5.0, size=(n, n))
    w = np.triu(w, 1)
    w = w + w.T
    return FiniteMetricSpace(shortest_path(w, directed=False))


def random_ultrametric(rng, n):
    pts = rng.normal(size=(n, 2))
    return FiniteMetricSpace(squareform(cophenet(linkage(pdist(pts), "single"))))


def random_porous_mask(rng, L, K, n, density):
    """Random set built so that every L-adic cube keeps one empty child."""
    res = L**K
    mask = np.zeros((res,) * n, dtype=bool)
    kids = list(itertools.product(range(L), repeat=n))

    def fill(origin, side):
        if side == 1:
            mask[tuple(origin)] = rng.random() < density
            return
        s = side // L
        hole = kids[int(rng.integers(len(kids)))]
        for k in kids:
            if k != hole:
                fill([o + ki * s for o, ki in zip(origin, k)], s)

    fill([0] * n, res)
    return GridSet(mask)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


# one line per acceptance criterion, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE, key=lambda r: (int(r[0].rstrip("ab")), r[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {num}: {detail}")
