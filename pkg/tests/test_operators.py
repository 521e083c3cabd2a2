import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindyn.operators import (
    BackwardShiftPower,
    Compose,
    Diagonal,
    DirectSum,
    ForwardShiftPower,
    Matrix,
    PolyTruncation,
    RankOne,
    ScaledIdentity,
    Sum,
    adjoint,
    apply,
    compose,
    materialize,
    power,
)

D = 5


def rand_vec(rng, d=D):
    return rng.standard_normal(d) + 1j * rng.standard_normal(d)


def random_op(rng, depth=0):
    """Random operator of any variant on C^D."""
    kind = rng.integers(9 if depth < 2 else 7)
    if kind == 0:
        return Matrix(rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D)))
    if kind == 1:
        return Diagonal(rand_vec(rng))
    if kind == 2:
        return BackwardShiftPower(D, complex(rand_vec(rng, 1)[0]), int(rng.integers(0, D + 2)))
    if kind == 3:
        return ForwardShiftPower(D, complex(rand_vec(rng, 1)[0]), int(rng.integers(0, D + 2)))
    if kind == 4:
        return PolyTruncation(D, rand_vec(rng, int(rng.integers(1, D + 1))))
    if kind == 5:
        f = rand_vec(rng)
        return RankOne(f, f, rand_vec(rng))
    if kind == 6:
        return ScaledIdentity(D, complex(rand_vec(rng, 1)[0]))
    if kind == 7:
        return Compose(random_op(rng, depth + 1), random_op(rng, depth + 1))
    return Sum((random_op(rng, depth + 1), random_op(rng, depth + 1)))


seeds = st.integers(0, 2**32 - 1)


class TestApply:
    def test_poly_truncation(self):
        np.testing.assert_array_equal(PolyTruncation(4, [1, 2]).apply([1, 1, 1, 1]), [1, 2, 0, 0])

    def test_backward_kills_e0(self):
        e0 = np.eye(4)[0]
        np.testing.assert_array_equal(BackwardShiftPower(4, 2, 1).apply(e0), 0)

    def test_rank_one(self):
        # (<y,f>/<e,f>) x = (2/1) * (0.3, 0.7)
        out = RankOne([1, 0], [1, 0], [0.3, 0.7]).apply([2, 0])
        np.testing.assert_allclose(out, [0.6, 1.4], atol=1e-15)

    def test_forward_drops_overflow(self):
        np.testing.assert_array_equal(ForwardShiftPower(3, 1, 1).apply([1, 2, 3]), [0, 1, 2])

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            Diagonal([1, 2]).apply([1, 2, 3])

    def test_rank_one_degenerate_anchor(self):
        with pytest.raises(ValueError):
            RankOne([1, 0], [0, 1], [1, 1])

    def test_batch_matches_rows(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            op = random_op(rng)
            V = rng.standard_normal((4, D)) + 1j * rng.standard_normal((4, D))
            np.testing.assert_allclose(op.apply(V), np.array([op.apply(v) for v in V]), atol=1e-12)

    def test_annihilation_of_low_support(self):
        rng = np.random.default_rng(1)
        for k in range(D + 1):
            v = np.zeros(D, dtype=complex)
            v[:k] = rand_vec(rng, k)
            assert np.all(apply(BackwardShiftPower(D, 3 - 1j, k), v) == 0)

    def test_direct_sum_blockwise(self):
        a, b = Diagonal([1, 2]), ScaledIdentity(1, 3)
        np.testing.assert_array_equal(DirectSum((a, b)).apply([1, 1, 1]), [1, 2, 3])


class TestMaterialize:
    def test_identity(self):
        np.testing.assert_array_equal(materialize(ScaledIdentity(3, 1)), np.eye(3))

    def test_backward_shift(self):
        M = materialize(BackwardShiftPower(3, 1, 1))
        expected = np.zeros((3, 3))
        expected[0, 1] = expected[1, 2] = 1
        np.testing.assert_array_equal(M, expected)

    @settings(max_examples=60)
    @given(seeds)
    def test_consistent_with_apply(self, seed):
        rng = np.random.default_rng(seed)
        op = random_op(rng)
        M = materialize(op)
        for _ in range(10):
            v = rand_vec(rng)
            assert np.linalg.norm(M @ v - apply(op, v)) <= 1e-10 * (1 + np.linalg.norm(v)) * (1 + np.abs(M).max())


class TestCompose:
    def test_scalars(self):
        c = compose(ScaledIdentity(3, 2), ScaledIdentity(3, 1j))
        np.testing.assert_allclose(c.apply([1, 1, 1]), [2j, 2j, 2j])

    def test_double_shift(self):
        B = BackwardShiftPower(4, 1, 1)
        np.testing.assert_array_equal(compose(B, B).apply(np.eye(4)[2]), np.eye(4)[0])

    def test_mismatch(self):
        with pytest.raises(ValueError):
            compose(Diagonal([1, 2]), Diagonal([1, 2, 3]))

    @settings(max_examples=40)
    @given(seeds)
    def test_associative(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (random_op(rng, 2) for _ in range(3))
        v = rand_vec(rng)
        lhs = compose(compose(a, b), c).apply(v)
        rhs = compose(a, compose(b, c)).apply(v)
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * (1 + np.linalg.norm(lhs))

    def test_matmul_operator(self):
        a, b = Diagonal([1, 2]), Diagonal([3, 4])
        np.testing.assert_array_equal((a @ b).apply([1, 1]), [3, 8])


class TestAdjoint:
    def test_diagonal(self):
        np.testing.assert_array_equal(adjoint(Diagonal([1j, 2])).entries, [-1j, 2])

    def test_shift_duality(self):
        assert adjoint(BackwardShiftPower(4, 1, 1)) == ForwardShiftPower(4, 1, 1)

    @settings(max_examples=60)
    @given(seeds)
    def test_inner_product(self, seed):
        rng = np.random.default_rng(seed)
        op = random_op(rng)
        u, v = rand_vec(rng), rand_vec(rng)
        lhs = np.vdot(v, op.apply(u))        # <Tu, v>
        rhs = np.vdot(adjoint(op).apply(v), u)  # <u, T*v>
        scale = (1 + np.abs(materialize(op)).max()) * (1 + np.linalg.norm(u)) * (1 + np.linalg.norm(v))
        assert abs(lhs - rhs) <= 1e-10 * scale

    @settings(max_examples=40)
    @given(seeds)
    def test_materialized_conjugate_transpose(self, seed):
        rng = np.random.default_rng(seed)
        op = random_op(rng)
        np.testing.assert_allclose(materialize(adjoint(op)), materialize(op).conj().T, atol=1e-10 * (1 + np.abs(materialize(op)).max()))

    def test_rank_one_zero_param(self):
        op = RankOne([1, 0], [1, 0], [0, 0])
        np.testing.assert_array_equal(materialize(adjoint(op)), np.zeros((2, 2)))


class TestLinearity:
    @settings(max_examples=60)
    @given(seeds)
    def test_linear(self, seed):
        rng = np.random.default_rng(seed)
        op = random_op(rng)
        u, v = rand_vec(rng), rand_vec(rng)
        a, b = rand_vec(rng, 2)
        lhs = op.apply(a * u + b * v)
        rhs = a * op.apply(u) + b * op.apply(v)
        assert np.linalg.norm(lhs - rhs) <= 1e-10 * (1 + np.linalg.norm(rhs)) * (1 + np.abs(materialize(op)).max())


class TestPower:
    def test_zero_is_identity(self):
        np.testing.assert_array_equal(materialize(power(Matrix(np.ones((2, 2))), 0)), np.eye(2))

    @pytest.mark.parametrize("op", [BackwardShiftPower(4, 2, 1), Diagonal([1, 2j, 3, 0.5]),
                                    Matrix(np.arange(16).reshape(4, 4) / 10), ScaledIdentity(4, 1 + 1j),
                                    PolyTruncation(4, [1, 2])])
    def test_matches_matrix_power(self, op):
        np.testing.assert_allclose(materialize(power(op, 3)), np.linalg.matrix_power(materialize(op), 3), atol=1e-12)
