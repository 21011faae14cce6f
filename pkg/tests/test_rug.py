import math

import numpy as np
import pytest
from scipy import integrate

from metrikit import REL_TOL, RugPoint, ball_measure, dilate, fit_constant, rug_distance, rug_norm
from metrikit import verify_lipschitz, verify_metric, vertical_field
from metrikit.errors import DomainError, InvalidDataError, PreconditionError
from metrikit.rug import order_probe, rug_distance_matrix, rug_grid, rug_space


def quadrature_unit_ball():
    # area of {|u| + |v|**0.5 < 1}: for each u the v-section has length 2 (1 - |u|)**2
    inner, _ = integrate.quad(lambda u: 2 * (1 - abs(u)) ** 2, -1, 1, points=[0])
    # cross-check with a 2-D integral of the indicator's v-bounds
    outer, _ = integrate.dblquad(
        lambda v, u: 1.0, -1, 1, lambda u: -((1 - abs(u)) ** 2), lambda u: (1 - abs(u)) ** 2
    )
    assert inner == pytest.approx(outer, rel=1e-9)
    return inner


def test_quadrature_oracle_is_four_thirds():
    assert quadrature_unit_ball() == pytest.approx(4 / 3, rel=1e-12)


class TestNorm:
    def test_examples(self):
        assert rug_norm(RugPoint(0, 0)) == 0
        assert rug_norm(RugPoint(2, 4)) == 4
        assert rug_norm(RugPoint(-1, -9)) == 4

    def test_distance_examples(self):
        assert rug_distance(RugPoint(1, 2), RugPoint(1, 2)) == 0
        assert rug_distance(RugPoint(0, 0), RugPoint(1, 1)) == 2
        assert rug_distance(RugPoint(0, 0), RugPoint(0, 0.25)) == 0.5

    def test_triangle(self, rng):
        pts = rng.normal(scale=3, size=(10_000, 4))
        for a, b, c, d in pts:
            p, q = RugPoint(a, b), RugPoint(c, d)
            assert rug_norm(p + q) <= (rug_norm(p) + rug_norm(q)) * (1 + REL_TOL)

    def test_non_finite(self):
        with pytest.raises(InvalidDataError):
            RugPoint(math.nan, 0)

    def test_matrix_matches_pointwise(self, rng):
        pts = rng.normal(size=(6, 2))
        D = rug_distance_matrix(pts)
        for i in range(6):
            for j in range(6):
                assert D[i, j] == pytest.approx(
                    rug_distance(RugPoint(*pts[i]), RugPoint(*pts[j])), rel=1e-15
                )

    def test_random_samples_are_metric(self, rng):
        for _ in range(20):
            pts = rng.uniform(-2, 2, size=(int(rng.integers(2, 25)), 2))
            assert verify_metric(rug_space(pts)).is_metric


class TestDilation:
    def test_examples(self):
        assert dilate(RugPoint(3, -2), 1) == RugPoint(3, -2)
        assert dilate(RugPoint(1, 1), 3) == RugPoint(3, 9)
        assert rug_norm(dilate(RugPoint(1, 1), 3)) == 6
        assert dilate(RugPoint(2, 4), 0.5) == RugPoint(1, 1)

    def test_bad_scale(self):
        with pytest.raises(DomainError):
            dilate(RugPoint(1, 1), 0)

    def test_homogeneity(self, rng):
        for x1, x2, r in zip(rng.normal(size=10_000), rng.normal(size=10_000), rng.uniform(0.01, 100, 10_000)):
            p = RugPoint(x1, x2)
            lhs, rhs = rug_norm(dilate(p, r)), r * rug_norm(p)
            assert abs(lhs - rhs) <= REL_TOL * rhs

    def test_group_law(self, rng):
        p = RugPoint(*rng.normal(size=2))
        r, s = 1.7, 0.3
        a, b = dilate(dilate(p, s), r), dilate(p, r * s)
        assert a.x1 == pytest.approx(b.x1) and a.x2 == pytest.approx(b.x2)


class TestBallMeasure:
    def test_unit_ball(self):
        est, err = ball_measure(1, 200_000, 3)
        assert abs(est - quadrature_unit_ball()) <= 3 * err

    def test_radius_two(self):
        est, err = ball_measure(2, 200_000, 4)
        assert abs(est - quadrature_unit_ball() * 8) <= 3 * err

    def test_deterministic(self):
        assert ball_measure(1.5, 5000, 11) == ball_measure(1.5, 5000, 11)

    def test_independent_of_worker_count(self, monkeypatch):
        monkeypatch.setenv("METRIKIT_THREADS", "1")
        one = ball_measure(1, 300_000, 5)
        monkeypatch.setenv("METRIKIT_THREADS", "4")
        assert ball_measure(1, 300_000, 5) == one

    def test_errors(self):
        with pytest.raises(DomainError):
            ball_measure(1, 999, 0)
        with pytest.raises(DomainError):
            ball_measure(0, 10_000, 0)


class TestVerticalField:
    def test_identity_is_order_two(self, rng):
        pts = rng.uniform(-1, 1, size=(40, 2))
        f = vertical_field(lambda u: u, 1, pts)
        S = rug_space(pts)
        assert fit_constant(S, f, 2).constant <= 1 + REL_TOL
        assert verify_lipschitz(S, f, 2, 1.0, tol=1e-12) == []

    def test_constant(self, rng):
        pts = rng.uniform(-1, 1, size=(15, 2))
        f = vertical_field(lambda u: np.full_like(u, 2.0), 1, pts)
        S = rug_space(pts)
        assert all(fit_constant(S, f, a).constant == 0 for a in (0.5, 2, 3, 7))

    def test_square_root_is_order_one(self):
        k = np.arange(-4, 5, dtype=float)
        x1, x2 = np.meshgrid(k / 4, k / 16, indexing="ij")
        pts = np.column_stack([x1.ravel(), x2.ravel()])
        f = vertical_field(lambda u: np.sqrt(np.abs(u)), 0.5, pts)
        S = rug_space(pts)
        # |sqrt|a| - sqrt|b|| <= |a - b|**0.5, so K = 1
        assert verify_lipschitz(S, f, 1, 1.0, tol=1e-12) == []
        assert fit_constant(S, f, 1).constant <= 1 + REL_TOL

    def test_points_as_rugpoints(self):
        f = vertical_field(lambda u: u, 1, [RugPoint(0, 1), RugPoint(5, -2)])
        np.testing.assert_array_equal(f.values, [1, -2])

    def test_order_above_two_rejected(self):
        with pytest.raises(PreconditionError):
            vertical_field(lambda u: u, 1.5, [[0, 0], [0, 1]])


class TestOrderProbe:
    def test_grid_spacing(self):
        pts = rug_grid(0.5, cells=2)
        assert pts.shape == (9, 2)
        assert sorted(set(pts[:, 1])) == [0, 0.25, 0.5]

    def test_horizontal_component_blows_up(self):
        alpha = 2.5
        meshes = [2.0**-k for k in range(1, 6)]
        out = order_probe(1, alpha, meshes)
        for (h, c), (_, c_half) in zip(out, out[1:]):
            assert c == pytest.approx(h ** (1 - alpha), rel=1e-12)
            assert c_half >= 2 ** (alpha - 2) * c * (1 - REL_TOL)

    def test_vertical_component_bounded_at_order_two(self):
        out = order_probe(2, 2.0, [0.5, 0.25, 0.125])
        assert all(c <= 1 + REL_TOL for _, c in out)

    def test_errors(self):
        with pytest.raises(DomainError):
            order_probe(3, 2.0, [0.5])
        with pytest.raises(DomainError):
            order_probe(1, 2.0, [])
