import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindyn.families import sample_family
from lindyn.groups import (
    RegularizedGroup,
    annulus_witness,
    check_group_axioms,
    derivative_shadow,
    diag_exp_group_family,
    difference_candidates,
    group_apply,
    sample_disk,
    scalar_exp_group,
)
from lindyn.testers import closure_check


class TestGroup:
    def test_zero_gives_c(self):
        g = RegularizedGroup([1.0, 2.0], [3.0, 4.0])
        np.testing.assert_allclose(group_apply(g, 0, [1, 1]), [3, 4])

    def test_i_pi(self):
        assert group_apply(scalar_exp_group(), 1j * np.pi, [1.0])[0] == pytest.approx(-1)

    def test_ln2(self):
        g = RegularizedGroup([1.0, 2.0], [1.0, 1.0])
        np.testing.assert_allclose(g.apply(np.log(2), [1, 1]), [2, 4])

    def test_zero_c_rejected(self):
        with pytest.raises(ValueError):
            RegularizedGroup([1.0, 1.0], [1.0, 0.0])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            RegularizedGroup([1.0], [1.0, 1.0])
        with pytest.raises(ValueError):
            group_apply(scalar_exp_group(), 0, [1, 2])

    def test_disk(self):
        assert np.all(np.abs(sample_disk(500, 1, 2.0)) <= 2.0)


class TestAxioms:
    def test_random_group_passes(self):
        rng = np.random.default_rng(0)
        g = RegularizedGroup(rng.uniform(-2, 2, 4) + 1j * rng.uniform(-2, 2, 4), rng.uniform(0.5, 2, 4))
        rep = check_group_axioms(g, 50, 1, np.eye(4))
        assert rep.verdict and rep.max_residual <= 1e-9

    def test_corrupted_c_fails(self):
        g = RegularizedGroup([1.0, -1.0], [2.0, 1.0])
        rep = check_group_axioms(g, 10, 0, np.eye(2), c_left=[2.0, 1.5])
        assert not rep.verdict

    def test_explicit_pairs(self):
        g = scalar_exp_group()
        rep = check_group_axioms(g, 0, 0, [[1.0]], pairs=[(0, 0), (1j, -1j)])
        assert rep.max_residual == 0.0 and len(rep.pairs) == 2

    def test_empty_probes(self):
        with pytest.raises(ValueError):
            check_group_axioms(scalar_exp_group(), 1, 0, np.zeros((0, 1)))

    def test_derivative_shadow_small(self):
        g = RegularizedGroup([1.0, 0.5j], [1.0, 2.0])
        assert derivative_shadow(g, sample_disk(10, 0, 2.0), np.eye(2)) <= 1e-6


class TestAnnulus:
    @pytest.mark.parametrize("w,r,expected", [(np.e, 0.5, 1.0), (np.e, 10.0, 1 + 4j * np.pi), (-1, 0, 1j * np.pi)])
    def test_examples(self, w, r, expected):
        assert annulus_witness(w, r) == pytest.approx(expected)

    def test_zero_raises(self):
        with pytest.raises(ValueError):
            annulus_witness(0, 1)

    @settings(max_examples=100)
    @given(st.floats(0.01, 100), st.floats(-np.pi, np.pi), st.floats(0, 500))
    def test_properties(self, mod, arg, r):
        w = mod * np.exp(1j * arg)
        z = annulus_witness(w, r)
        assert abs(z) >= r
        assert abs(np.exp(z) - w) <= 1e-9 * (1 + abs(w)) * (1 + abs(z))
        # minimality: the previous branch (if k > 0) lies inside the disk
        k = round((z.imag - np.angle(w)) / (2 * np.pi))
        if k > 0:
            assert abs(z - 2j * np.pi) < r


class TestGroupFamily:
    def test_scalar_witness(self):
        fam = diag_exp_group_family(scalar_exp_group())
        z = fam.witness_solver(np.array([1.0 + 0j]), np.array([-2.0 + 0j]))
        assert np.exp(z) == pytest.approx(-2.0)

    def test_witness_rejects_inconsistent(self):
        fam = diag_exp_group_family(RegularizedGroup([1.0, 1.0], [1.0, 1.0]))
        assert fam.witness_solver(np.array([1, 1], complex), np.array([2, 3], complex)) is None

    def test_closure_c_identity(self):
        fam = diag_exp_group_family(RegularizedGroup([1.0, 0.5], [1.0, 1.0]), radius=1.0)
        assert closure_check(fam, 5, 0, np.eye(2), 1e-9).verdict

    def test_difference_candidates(self):
        fam = diag_exp_group_family(scalar_exp_group())
        base = np.array([1.0 + 0j])
        (z3, op), = difference_candidates(fam, base, np.array([2.0 + 0j]), np.array([6.0 + 0j]))
        assert op.apply([2.0])[0] == pytest.approx(6.0)

    def test_sampler_deterministic(self):
        fam = diag_exp_group_family(scalar_exp_group(), z_sampler={"radius": 1.0})
        a = [p for p, _ in sample_family(fam, 5, 1)]
        assert a == [p for p, _ in sample_family(fam, 5, 1)]
        assert all(abs(z) <= 1.0 for z in a)
