import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindyn.space import (
    BasisBall,
    SpaceConfig,
    as_vector,
    distance,
    make_basis_balls,
    make_target_grid,
    norm,
    standard_basis,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


def cvecs(dim):
    return st.lists(cplx, min_size=dim, max_size=dim).map(lambda v: np.array(v, dtype=complex))


class TestNorms:
    def test_zero(self):
        assert norm(np.zeros(4, dtype=complex)) == 0.0

    def test_unit_basis(self):
        assert norm(standard_basis(8, 2)) == 1.0

    def test_pythagorean(self):
        assert norm([3, 4, 0, 0]) == 5.0

    def test_distance_identity(self):
        u = np.array([1 + 2j, -3j])
        assert distance(u, u) == 0.0

    def test_distance_simple(self):
        assert distance([3, 4], [0, 0]) == 5.0

    def test_distance_dim_mismatch(self):
        with pytest.raises(ValueError):
            distance([1, 2], [1, 2, 3])

    @given(cvecs(5), cvecs(5), cvecs(5))
    def test_triangle(self, u, v, w):
        assert distance(u, w) <= distance(u, v) + distance(v, w) + 1e-12 * (1 + norm(u) + norm(v) + norm(w))

    @given(cvecs(6), cplx)
    def test_homogeneity(self, v, a):
        assert norm(a * v) == pytest.approx(abs(a) * norm(v), rel=1e-12, abs=1e-300)


class TestBasis:
    def test_first_and_last(self):
        np.testing.assert_array_equal(standard_basis(SpaceConfig(3), 0), [1, 0, 0])
        np.testing.assert_array_equal(standard_basis(SpaceConfig(3), 2), [0, 0, 1])

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            standard_basis(3, 3)

    def test_unit_norm(self):
        assert all(norm(standard_basis(7, k)) == 1.0 for k in range(7))

    def test_config_rejects_zero(self):
        with pytest.raises(ValueError):
            SpaceConfig(0)

    def test_as_vector_rejects_nan(self):
        with pytest.raises(ValueError):
            as_vector([1.0, np.nan])
        with pytest.raises(ValueError):
            as_vector([1.0, 2.0], dim=3)


class TestGrids:
    def test_lattice_counts(self):
        assert len(make_target_grid(4, "lattice", 2, spacing=1, effective_dims=1)) == 25
        assert len(make_target_grid(4, "lattice", 2, spacing=1, effective_dims=2)) == 625

    def test_lattice_d1_values(self):
        g = make_target_grid(3, "lattice", 2, spacing=1, effective_dims=1)
        re = sorted({p.real for p in g.points[:, 0]})
        assert re == [-2, -1, 0, 1, 2]
        assert np.all(g.points[:, 1:] == 0)

    def test_lattice_symmetric(self):
        g = make_target_grid(3, "lattice", 1, spacing=0.5, effective_dims=2)
        keys = {tuple(np.round(p, 12)) for p in g.points}
        assert all(tuple(np.round(-p, 12) + 0.0) in keys for p in g.points)

    def test_lattice_norm_bound(self):
        g = make_target_grid(5, "lattice", 2, spacing=0.5, effective_dims=2)
        assert np.linalg.norm(g.points, axis=1).max() <= g.radius_bound + 1e-12

    def test_random_grid(self):
        g = make_target_grid(6, "seeded-random", 1.0, count=100, seed=3)
        assert len(g) == 100
        assert np.linalg.norm(g.points, axis=1).max() <= 1.0 + 1e-12
        g2 = make_target_grid(6, "seeded-random", 1.0, count=100, seed=3)
        np.testing.assert_array_equal(g.points, g2.points)

    def test_random_effective_dims(self):
        g = make_target_grid(6, "seeded-random", 1.0, count=10, effective_dims=2, seed=0)
        assert np.all(g.points[:, 2:] == 0)

    @pytest.mark.parametrize("kw", [dict(R=-1, spacing=1), dict(R=1, spacing=0), dict(R=1, spacing=1, effective_dims=9)])
    def test_invalid_lattice(self, kw):
        with pytest.raises(ValueError):
            make_target_grid(4, "lattice", **kw)

    def test_invalid_kind(self):
        with pytest.raises(ValueError):
            make_target_grid(4, "hexagonal", 1.0, spacing=1)

    def test_random_needs_count(self):
        with pytest.raises(ValueError):
            make_target_grid(4, "seeded-random", 1.0, count=0)


class TestBalls:
    def test_radii(self):
        g = make_target_grid(2, "lattice", 1, spacing=1, effective_dims=1)
        assert [b.radius for b in make_basis_balls(g, 3, 1.0)] == [1.0, 0.5, 1.0 / 3]

    def test_empty(self):
        g = make_target_grid(2, "lattice", 1, spacing=1, effective_dims=1)
        assert make_basis_balls(g, 0, 1.0) == []

    def test_centers_cycle(self):
        g = make_target_grid(2, "lattice", 1, spacing=1, effective_dims=1)
        balls = make_basis_balls(g, 2 * len(g), 1.0)
        for i, b in enumerate(balls):
            np.testing.assert_array_equal(b.center, g.points[i % len(g)])

    def test_bad_r0(self):
        with pytest.raises(ValueError):
            make_basis_balls(np.zeros((1, 2)), 1, 0.0)

    def test_nonpositive_radius(self):
        with pytest.raises(ValueError):
            BasisBall(np.zeros(2), 0.0)

    @settings(max_examples=50)
    @given(cvecs(3), st.floats(0.01, 10))
    def test_membership_matches_distance(self, v, r):
        b = BasisBall(np.array([1, 1j, 0]), r)
        assert (v in b) == (distance(v, b.center) <= r)
