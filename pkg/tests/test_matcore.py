import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvoptbl.matcore import (
    NEG_INF,
    DimensionError,
    MatPoly,
    adjoint,
    commutator,
    is_antisymmetric,
    is_symmetric,
    mat_add,
    mat_mul,
    mat_scale,
    mat_sub,
    solve_least_squares,
    x_times,
)


def rand_poly(rng, N, deg):
    return MatPoly(rng.standard_normal((deg + 1, N, N)))


def test_identity_product():
    assert np.array_equal(mat_mul(np.eye(2), np.eye(2)), np.eye(2))


def test_transpose_of_subdiagonal_is_superdiagonal():
    A = np.diag([2.0, 3.0], -1)
    assert np.array_equal(adjoint(A), np.diag([2.0, 3.0], 1))


def test_commutator_with_diagonal_is_antisymmetric():
    rng = np.random.default_rng(0)
    B = rng.standard_normal((4, 4))
    W = B @ B.T
    C = commutator(np.diag([1.0, 2, 3, 4]), W)
    brute = all(abs(C[i, j] + C[j, i]) < 1e-12 for i in range(4) for j in range(4))
    assert brute and is_antisymmetric(C)
    assert is_symmetric(W) and not is_symmetric(C)


def test_matrix_ops_reject_mismatched_shapes():
    with pytest.raises(DimensionError):
        mat_add(np.eye(2), np.eye(3))
    with pytest.raises(DimensionError):
        mat_sub(np.eye(2), np.eye(3))
    with pytest.raises(DimensionError):
        mat_mul(np.ones((2, 3)), np.ones((2, 3)))
    assert np.array_equal(mat_scale(2, np.eye(2)), 2 * np.eye(2))


def test_derivative_of_linear_is_constant():
    psi1, psi0 = np.diag([-3.0, -2.0]), np.ones((2, 2))
    p = MatPoly(np.stack([psi0, psi1]))
    d = p.derivative()
    assert d.degree == 0 and np.array_equal(d.coeff(0), psi1)


def test_shift_back_by_one():
    p = MatPoly.monomial(2, np.eye(2))
    assert np.allclose(p.shift(-1)(3.0), 4 * np.eye(2))


def test_product_of_linear_monomials():
    rng = np.random.default_rng(1)
    A, B = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    prod = MatPoly.monomial(1, A) @ MatPoly.monomial(1, B)
    assert prod.degree == 2 and np.allclose(prod.coeff(2), A @ B)
    assert np.allclose(prod.coeff(0), 0) and np.allclose(prod.coeff(1), 0)


def test_zero_polynomial():
    z = MatPoly.zeros(2)
    assert z.is_zero() and z.degree == NEG_INF and z.max_coeff_norm() == 0
    assert (z @ x_times(2)).is_zero()


def test_max_coeff_norm():
    assert x_times(2).max_coeff_norm() == 1
    p = MatPoly(np.random.default_rng(2).standard_normal((3, 2, 2)))
    assert (p - p).max_coeff_norm() == 0


def test_trailing_zeros_trimmed():
    c = np.zeros((4, 2, 2))
    c[1] = np.eye(2)
    assert MatPoly(c).degree == 1


def test_scalar_add_lifts_to_identity():
    p = x_times(2) + 3
    assert np.allclose(p(1.0), 4 * np.eye(2))
    with pytest.raises(TypeError):
        _ = x_times(2) * np.eye(2)


def test_size_mismatch():
    with pytest.raises(DimensionError):
        _ = x_times(2) + x_times(3)
    with pytest.raises(DimensionError):
        _ = x_times(2) @ x_times(3)


def test_from_entries_and_constant_matmul():
    p = MatPoly.from_entries([[[1, 2], [0]], [[0], [0, 0, 3]]])
    assert p.degree == 2 and np.allclose(p(2.0), [[5, 0], [0, 12]])
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose((A @ p)(2.0), A @ p(2.0))
    assert np.allclose((p @ A)(2.0), p(2.0) @ A)


degrees = st.integers(min_value=0, max_value=4)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), degrees, degrees, degrees)
def test_product_associative(seed, d1, d2, d3):
    rng = np.random.default_rng(seed)
    p, q, r = (rand_poly(rng, 3, d) for d in (d1, d2, d3))
    assert ((p @ q) @ r).allclose(p @ (q @ r), rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), degrees, degrees)
def test_adjoint_reverses_products(seed, d1, d2):
    rng = np.random.default_rng(seed)
    p, q = rand_poly(rng, 3, d1), rand_poly(rng, 3, d2)
    assert (p @ q).T.allclose(q.T @ p.T, rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), degrees, st.floats(-3, 3))
def test_shift_round_trip(seed, d, h):
    p = rand_poly(np.random.default_rng(seed), 2, d)
    assert p.shift(h).shift(-h).allclose(p, rtol=1e-12, atol=1e-12 * max(1, abs(h)) ** d)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), degrees, degrees)
def test_evaluation_commutes_with_arithmetic(seed, d1, d2):
    rng = np.random.default_rng(seed)
    p, q = rand_poly(rng, 2, d1), rand_poly(rng, 2, d2)
    xs = rng.uniform(-2, 2, 20)
    for x in xs:
        assert np.allclose((p + q)(x), p(x) + q(x), rtol=1e-12, atol=1e-12)
        assert np.allclose((p @ q)(x), p(x) @ q(x), rtol=1e-11, atol=1e-11)
        assert np.allclose(p.derivative()(x), sum(k * p.coeff(k) * x ** (k - 1)
                                                  for k in range(1, d1 + 1)) + 0 * p(x))
        assert np.allclose(p.shift(0.5)(x), p(x + 0.5), rtol=1e-11, atol=1e-11)
    assert np.allclose(p(xs), np.stack([p(x) for x in xs]))


def test_lstsq_identity():
    res = solve_least_squares(np.eye(3), [1, 2, 3])
    assert np.allclose(res.solution, [1, 2, 3]) and res.residual_norm < 1e-15
    assert res.nullspace.shape[0] == 0 and res.rank == 3


def test_lstsq_rank_one():
    res = solve_least_squares([[1, 0], [1, 0]], [1, 1])
    assert np.allclose(res.solution, [1, 0]) and res.nullspace.shape[0] == 1
    assert np.allclose(abs(res.nullspace[0]), [0, 1])


def test_lstsq_inconsistent():
    res = solve_least_squares([[1.0], [0.0]], [0.0, 1.0])
    assert res.residual_norm == pytest.approx(1.0)


def test_lstsq_all_zero_matrix():
    res = solve_least_squares(np.zeros((2, 2)), [3.0, 4.0])
    assert res.rank == 0 and res.residual_norm == pytest.approx(5.0)


def test_lstsq_empty_system():
    with pytest.raises(DimensionError):
        solve_least_squares(np.zeros((0, 2)), [])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(0, 3))
def test_lstsq_recovers_consistent_systems(seed, k, extra):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((k + extra, k))
    b = A @ rng.standard_normal(k)
    res = solve_least_squares(A, b)
    assert res.residual_norm < 1e-10 * max(1.0, np.linalg.norm(b))
