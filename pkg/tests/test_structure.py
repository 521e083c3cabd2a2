import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindyn.dynamics import compute_orbit
from lindyn.families import make_family, sample_family, scalar_family
from lindyn.operators import Diagonal, ScaledIdentity, materialize
from lindyn.structure import (
    ConjugationMap,
    PairedFamily,
    conjugate_family,
    derive_seed,
    direct_sum_family,
    intertwining_residual,
    project_component,
    random_conjugation,
    spectral_norm,
)


class TestSpectralNorm:
    @settings(max_examples=25)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_svd(self, seed):
        rng = np.random.default_rng(seed)
        M = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        s, _ = spectral_norm(M, iters=2000, tol=1e-14)
        assert s == pytest.approx(np.linalg.norm(M, 2), rel=1e-6)

    def test_zero(self):
        assert spectral_norm(np.zeros((3, 3))) == (0.0, True)

    def test_random_conjugation_bound(self):
        phi = random_conjugation(8, cond=10, seed=2)
        assert phi.operator_norm_bound == pytest.approx(10.0, rel=1e-8)
        assert phi.invertible


class TestConjugationMap:
    def test_identity(self):
        phi = ConjugationMap.from_matrix(np.eye(3))
        v = np.array([1, 2j, 3])
        np.testing.assert_array_equal(phi.apply(v), v)
        np.testing.assert_array_equal(phi.apply_inverse(v), v)

    def test_singular_rejected(self):
        with pytest.raises(ValueError):
            ConjugationMap.from_matrix(np.diag([1.0, 0.0]))

    def test_surrogate_allowed(self):
        phi = ConjugationMap.from_matrix(np.diag([1.0, 0.0]), dense_range_surrogate=True)
        assert not phi.invertible
        with pytest.raises(ValueError):
            phi.apply_inverse([1, 1])

    def test_non_square(self):
        with pytest.raises(ValueError):
            ConjugationMap.from_matrix(np.ones((2, 3)))


class TestIntertwining:
    def test_d1_residual(self):
        # phi = 1, T = 2, S = 3: |3 - 2| = 1 at v = 1
        phi = ConjugationMap.from_matrix([[1.0]])
        assert intertwining_residual(ScaledIdentity(1, 2), ScaledIdentity(1, 3), phi, [[1.0]]) == 1.0

    def test_diagonal_phi(self):
        phi = ConjugationMap.from_matrix(np.diag([2.0, 3.0]))
        T = Diagonal([1.0, -1.0])
        assert intertwining_residual(T, T, phi, np.eye(2)) == 0.0

    def test_conjugate_family_exact(self):
        fam = make_family("rank_one", 4)
        phi = random_conjugation(4, cond=10, seed=1)
        paired = PairedFamily(fam, conjugate_family(fam, phi), phi)
        assert paired.max_residual(10, 0, np.eye(4)) <= 1e-10

    def test_conjugate_orbit_transfer(self):
        fam = make_family("rank_one", 4)
        phi = random_conjugation(4, cond=5, seed=3)
        img = conjugate_family(fam, phi)
        x = np.array([1, 0.5, 0.25, 0.125], complex)
        a = compute_orbit(fam, x, 20, seed=9)
        b = compute_orbit(img, phi.apply(x), 20, seed=9)
        np.testing.assert_allclose(phi.apply(a.images), b.images, atol=1e-10)

    def test_conjugate_witness(self):
        fam = make_family("rank_one", 3)
        phi = random_conjugation(3, seed=4)
        img = conjugate_family(fam, phi)
        x, y = np.array([1, 1, 1], complex), np.array([0, 2, -1j])
        p = img.witness_solver(x, y)
        np.testing.assert_allclose(img.member(p).apply(x), y, atol=1e-10)

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            conjugate_family(scalar_family(2), ConjugationMap.from_matrix(np.eye(3)))


class TestDirectSum:
    def test_dims_and_seeds(self):
        f1, f2 = make_family("scalar", 1), make_family("rank_one", 2)
        ds = direct_sum_family([f1, f2])
        assert ds.dim == 3 and ds.info["dims"] == (1, 2)
        params = [p for p, _ in sample_family(ds, 4, 7)]
        assert [p[0] for p in params] == [q for q, _ in sample_family(f1, 4, derive_seed(7, 0))]
        assert [p[1] for p in params] == [q for q, _ in sample_family(f2, 4, derive_seed(7, 1))]

    def test_blockwise_member(self):
        ds = direct_sum_family([scalar_family(1), scalar_family(2)])
        M = materialize(ds.member((2.0, 3j)))
        np.testing.assert_array_equal(M, np.diag([2.0, 3j, 3j]))

    def test_projection_of_orbit(self):
        f1, f2 = make_family("scalar", 1), make_family("rank_one", 2)
        ds = direct_sum_family([f1, f2])
        x = np.array([1.0, 1.0, 0.5], complex)
        orb = compute_orbit(ds, x, 6, seed=2)
        for i, f in enumerate([f1, f2]):
            sub = project_component(orb, i, [1, 2])
            direct = compute_orbit(f, project_component(x, i, [1, 2]), 6, seed=derive_seed(2, i))
            np.testing.assert_allclose(sub.images, direct.images, atol=1e-14)
            assert list(sub.params) == list(direct.params)

    def test_projection_errors(self):
        with pytest.raises(IndexError):
            project_component(np.zeros(3), 2, [1, 2])
        with pytest.raises(ValueError):
            project_component(np.zeros(4), 0, [1, 2])

    def test_witness_componentwise(self):
        ds = direct_sum_family([scalar_family(1), make_family("rank_one", 2)])
        x = np.array([2, 1, 1], complex)
        y = np.array([6, 3, -1], complex)
        p = ds.witness_solver(x, y)
        np.testing.assert_allclose(ds.member(p).apply(x), y, atol=1e-12)
        assert ds.witness_solver(np.array([0, 1, 1], complex), y) is None
