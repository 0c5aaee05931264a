import math

import numpy as np
import pytest

from mvoptbl.families import (
    FamilyError,
    build_family,
    charlier_L,
    charlier_weight_poly,
    family_catalog,
    nilpotent_binomial_power,
    pearson_residuals,
    switching_residual,
    weight_derivative,
    weight_eval,
    weight_from_factors,
)
from mvoptbl.matcore import max_abs


def all_instances(sizes=range(1, 6)):
    out = []
    for N in sizes:
        for nu in (0.5, 1.0, 2.0):
            for s in (1, 2, 3):
                out.append(build_family("hermite", N, nu, s))
                out.append(build_family("laguerre", N, nu, s))
            if N % 2:
                out.append(build_family("gegenbauer", N, nu))
        for nu in (0, 1, 2):
            for a in (0.5, 1.0, 3.0):
                out.append(build_family("charlier", N, nu, a=a))
    return out


GRID = all_instances()


def test_hermite_set1_parameters():
    f = build_family("hermite", 2, 1.0, 1)
    assert f.params["d"] == pytest.approx(0.5) and f.params["c"] == pytest.approx(0.5)
    assert np.allclose(f.params["alpha"], [1, math.sqrt(0.5)])
    assert np.allclose(f.params["t"], [1, 2])
    assert np.allclose(f.psi[0], np.diag([-3.0, -2.0]))


@pytest.mark.parametrize("nu", [0.5, 1.0, 3.0])
def test_scalar_hermite_collapses(nu):
    f = build_family("hermite", 1, nu, 1)
    assert np.allclose(f.Phi()(0.7), [[1.0]])
    assert np.allclose(f.Psi().coeffs.ravel(), [0.0, -2.0])
    assert max(pearson_residuals(f)) < 1e-14


def test_free_weight_at_origin():
    f = build_family("hermite_free", 2, t=[1.5, 4.0])
    assert np.allclose(weight_eval(f, 0.0), np.diag([1.5, 4.0]))


@pytest.mark.parametrize("f", GRID[::7], ids=lambda f: f"{f.kind}-N{f.N}")
def test_weight_symmetric_and_recomposes(f):
    for x in f.sample_points():
        W = weight_eval(f, x)
        assert max_abs(W - W.T) <= 1e-13 * max_abs(W)
        assert np.allclose(W, weight_from_factors(f, x), rtol=1e-12, atol=1e-13 * max_abs(W))


def test_charlier_poly_small_sizes():
    assert np.allclose(nilpotent_binomial_power(np.zeros((1, 1))).coeffs, [[[1.0]]])
    A = np.array([[0.0, 0.0], [0.7, 0.0]])
    p = nilpotent_binomial_power(A, 0.0)
    assert p.degree == 1 and np.allclose(p.coeff(0), np.eye(2)) and np.allclose(p.coeff(1), A)
    f = build_family("charlier", 1, 0, a=2.0)
    assert charlier_weight_poly(f).degree == 0


def test_nilpotent_power_rejects_non_nilpotent():
    with pytest.raises(FamilyError):
        nilpotent_binomial_power(np.eye(2))


@pytest.mark.parametrize("N,nu", [(2, 0), (3, 1), (4, 2)])
def test_charlier_factor_is_matrix_power(N, nu):
    f = build_family("charlier", N, nu, a=1.5)
    IA = np.eye(N) + f.A
    for x in range(6):
        assert np.allclose(f.L(x), np.linalg.matrix_power(IA, x + nu))
    Lc = charlier_L(N, 1.5)
    for x in range(5):
        assert np.allclose(Lc(x + 1), Lc(x) @ IA)


def test_charlier_backward_identity_n2():
    f = build_family("charlier", 2, 0, a=1.0)
    g = f.shifted()
    for x in range(1, 11):
        lhs = weight_eval(g, x) - weight_eval(g, x - 1)
        assert max_abs(lhs - weight_eval(f, x) @ f.Psi()(x)) < 1e-12 * max_abs(weight_eval(g, x))


@pytest.mark.parametrize("f", GRID, ids=lambda f: f"{f.kind}-{f.set_id}-N{f.N}-nu{f.nu}-{f.params.get('a')}")
def test_pearson_and_switching(f):
    rp, rs = pearson_residuals(f)
    assert rp < 1e-10 and rs < 1e-10
    assert switching_residual(f) < 1e-10


@pytest.mark.parametrize("f", GRID[::5], ids=lambda f: f"{f.kind}-N{f.N}")
def test_weight_structure(f):
    assert f.Q.degree <= 2 * f.N - 2
    assert f.Phi().degree <= 2 and f.Psi().degree <= 1
    L0 = f.L.coeffs
    for k in range(L0.shape[0]):
        assert np.allclose(np.triu(L0[k], 1), 0)
    assert np.allclose(np.diag(f.L(0.3 if not f.is_discrete else 0.0)), 1)
    # W = w L T L^T with unit triangular L, so W > 0 wherever T has a positive diagonal
    for x in f.sample_points():
        if f.kind == "gegenbauer" and abs(x) == 1:
            continue
        assert np.all(np.diag(f.Tpoly(x)) > 0) and f.scalar_weight(x) > 0


def test_q_degree_is_attained():
    for N in range(1, 6):
        assert build_family("laguerre", N, 1.0, 1).Q.degree == 2 * N - 2
        assert build_family("hermite", N, 1.0, 1).Q.degree == 2 * N - 2
        assert build_family("charlier", N, 1, a=1.0).Q.degree == 2 * N - 2
    for N in (1, 3, 5):
        assert build_family("gegenbauer", N, 1.0).Q.degree == 2 * N - 2


@pytest.mark.parametrize("N", [1, 3, 5])
def test_gegenbauer_half_collapses_degree(N):
    # at nu = 1/2 the top coefficients cancel exactly; the product is still L T L^T
    f = build_family("gegenbauer", N, 0.5)
    assert f.Q.degree == N - 1
    for x in (3.0, 10.0):
        L = f.L(x)
        assert np.allclose(L @ f.Tpoly(x) @ L.T, f.Q(x), rtol=1e-14)


def test_weight_is_positive_definite_on_moderate_points():
    for f in GRID[::3]:
        for x in f.sample_points()[:6]:
            if f.kind == "gegenbauer" and abs(x) == 1:
                continue
            W = weight_eval(f, x)
            assert np.linalg.eigvalsh(W)[0] > 0


def test_scalar_weights():
    assert build_family("gegenbauer", 1, 1.0).Q.degree == 0
    f = build_family("laguerre", 1, 0.5, 1)
    assert f.scalar_weight(2.0) == pytest.approx(2.0**1.5 * math.exp(-2))
    f = build_family("charlier", 1, 0, a=3.0)
    assert f.scalar_weight(4.0) == pytest.approx(3.0**4 / 24)


@pytest.mark.parametrize("f", [build_family("hermite", 2, 1.0, 2), build_family("laguerre", 3, 0.5, 3),
                               build_family("gegenbauer", 3, 2.0)], ids=["hermite", "laguerre", "gegenbauer"])
def test_weight_derivative_matches_finite_difference(f):
    h = 1e-6
    for x in f.sample_points()[1:-1]:
        fd = (weight_eval(f, x + h) - weight_eval(f, x - h)) / (2 * h)
        assert np.allclose(weight_derivative(f, x), fd, rtol=1e-5, atol=1e-7 * max_abs(fd) + 1e-9)


def test_gegenbauer_other_sign_breaks_pearson():
    f = build_family("gegenbauer", 3, 1.0, phi0_ell_sign=1)
    assert max(pearson_residuals(f)) > 1e-3
    assert max(pearson_residuals(build_family("gegenbauer", 1, 1.0, phi0_ell_sign=1))) < 1e-12


def test_free_family_has_no_pearson_data():
    f = build_family("hermite_free", 3)
    assert not f.has_pearson
    with pytest.raises(FamilyError):
        pearson_residuals(f)
    with pytest.raises(FamilyError):
        f.Phi()


@pytest.mark.parametrize("kind,args,kw", [
    ("bogus", (2, 1.0), {}),
    ("hermite", (2, 1.0, 4), {}),
    ("hermite", (0, 1.0, 1), {}),
    ("hermite", (2, -1.0, 1), {}),
    ("laguerre", (2, 1.0, 2), {"lam": -1.0}),
    ("charlier", (2, 0.5), {"a": 1.0}),
    ("charlier", (2, 1), {}),
    ("hermite_free", (2,), {"t": [1.0, -1.0]}),
    ("hermite_free", (2,), {"alpha": [1.0]}),
    ("gegenbauer", (3, 1.0), {"phi0_ell_sign": 0}),
])
def test_invalid_parameters(kind, args, kw):
    with pytest.raises(FamilyError):
        build_family(kind, *args, **kw)


def test_weight_eval_off_support():
    with pytest.raises(FamilyError):
        weight_eval(build_family("laguerre", 2, 1.0, 1), -0.5)
    with pytest.raises(FamilyError):
        weight_eval(build_family("gegenbauer", 3, 1.0), 1.5)
    with pytest.raises(FamilyError):
        weight_eval(build_family("charlier", 2, 0, a=1.0), 0.5)


def test_shift_keeps_extra_parameters():
    f = build_family("laguerre", 2, 1.0, 3, rho=2.0, C=0.25, a=0.7)
    g = f.shifted()
    assert g.nu == 2.0 and g.params["a"] == 0.7 and g.params["rho"] == 2.0


def test_catalog_and_dict():
    kinds = [c["kind"] for c in family_catalog()]
    assert set(kinds) == {"hermite", "laguerre", "gegenbauer", "charlier", "hermite_free"}
    d = build_family("charlier", 2, 1, a=1.0).to_dict()
    assert d["kind"] == "charlier" and "phi" in d and d["support"] == "nonnegative_integers"
