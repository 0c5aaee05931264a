import math

import numpy as np
import pytest
from scipy import special

from mvoptbl import classical
from mvoptbl.classical import (
    band_rule,
    charlier,
    charlier_sum_rule,
    gauss_rule,
    gegenbauer,
    hermite,
    laguerre,
)


def test_hermite_low_degrees():
    assert np.allclose(hermite(0).coef, [1])
    assert np.allclose(hermite(1).coef, [0, 2])


@pytest.mark.parametrize("n", range(9))
def test_against_scipy(n):
    x = np.linspace(-2, 3, 13)
    assert np.allclose(hermite(n)(x), special.eval_hermite(n, x), rtol=1e-12)
    assert np.allclose(laguerre(n, 1.5)(x), special.eval_genlaguerre(n, 1.5, x), rtol=1e-11, atol=1e-12)
    assert np.allclose(gegenbauer(n, 0.75)(x), special.eval_gegenbauer(n, 0.75, x), rtol=1e-11,
                       atol=1e-12)


def test_gegenbauer_degree_one():
    assert np.allclose(gegenbauer(1, 1.3).coef, [0, 2.6])


def charlier_series(n, a, x):
    # 2F0(-n, -x;; -1/a) = sum_k (-n)_k (-x)_k (-1/a)^k / k!
    return sum(special.poch(-n, k) * special.poch(-x, k) * (-1 / a) ** k / math.factorial(k)
               for k in range(n + 1))


@pytest.mark.parametrize("n", range(7))
def test_charlier_hypergeometric(n):
    for a in (0.5, 1.0, 3.0):
        for x in (0.0, 1.0, 2.5, 7.0):
            assert charlier(n, a)(x) == pytest.approx(charlier_series(n, a, x), rel=1e-11, abs=1e-11)
    assert np.allclose(charlier(1, 2.0).coef, [1, -0.5])


def test_negative_degree_rejected():
    for fn in (hermite, lambda n: laguerre(n, 1), lambda n: gegenbauer(n, 1)):
        with pytest.raises(ValueError):
            fn(-1)
    with pytest.raises(ValueError):
        charlier(2, 0.0)


def test_hermite_rule_one_node():
    q = gauss_rule("hermite", 1)
    assert q.nodes[0] == pytest.approx(0) and q.weights[0] == pytest.approx(math.sqrt(math.pi))


@pytest.mark.parametrize("n", [2, 7, 40])
def test_hermite_rule_mass_and_moments(n):
    q = gauss_rule("hermite", n)
    assert abs(q.weights.sum() - math.sqrt(math.pi)) < 1e-13
    for p in range(0, 2 * n, 2):
        exact = math.gamma((p + 1) / 2)
        assert q.moment(p) == pytest.approx(exact, rel=1e-11)
        assert abs(q.moment(p + 1)) < 1e-11 * exact
    assert q.exactness == 2 * n - 1 and len(q) == n


@pytest.mark.parametrize("s", [0.5, 1.0, 3.0])
def test_laguerre_rule_moments(s):
    q = gauss_rule("laguerre", 20, s=s)
    for p in range(40):
        exact = math.exp(special.gammaln(s + 1 + p))
        assert q.moment(p) == pytest.approx(exact, rel=1e-11)


@pytest.mark.parametrize("nu", [0.5, 1.0, 2.5])
def test_gegenbauer_rule_moments(nu):
    q = gauss_rule("gegenbauer", 15, nu=nu)
    e = nu - 0.5
    for p in range(0, 30, 2):
        exact = special.beta((p + 1) / 2, e + 1)
        assert q.moment(p) == pytest.approx(exact, rel=1e-11)


def test_jacobi_rule_mass():
    q = gauss_rule("jacobi", 12, alpha=0.3, beta=1.7)
    exact = 2 ** 3.0 * special.beta(1.3, 2.7)
    assert q.weights.sum() == pytest.approx(exact, rel=1e-12)


def test_rule_errors():
    with pytest.raises(ValueError):
        gauss_rule("hermite", 0)
    with pytest.raises(ValueError):
        gauss_rule("laguerre", 4, s=-1.0)
    with pytest.raises(ValueError):
        gauss_rule("bogus", 4)


def test_charlier_sum_rule_moments():
    for a in (0.5, 1.0, 3.0):
        q = charlier_sum_rule(a, tail_tol=1e-16)
        assert q.weights.sum() == pytest.approx(math.exp(a), abs=1e-16 * math.exp(a) * 10)
        assert q.moment(1) == pytest.approx(a * math.exp(a), rel=1e-14)
        # second moment a(a+1)e^a
        assert q.moment(2) == pytest.approx(a * (a + 1) * math.exp(a), rel=1e-14)


def test_charlier_sum_rule_tail_below_tolerance():
    q = charlier_sum_rule(1.0, tail_tol=1e-16, degree_cap=10)
    x_max = int(q.nodes[-1])
    assert x_max >= 20
    # neglected tail of sum x^20 / x!, summed directly
    tail = sum(math.exp(20 * math.log(x) - math.lgamma(x + 1)) for x in range(x_max + 1, x_max + 400))
    assert tail < 1e-16 * math.e


def test_cut_at_twenty_is_not_enough_for_degree_cap_ten():
    # sum_{x > 20} x^20 / x! is far above 1e-16 e, so the cut must sit well beyond 20
    tail = sum(math.exp(20 * math.log(x) - math.lgamma(x + 1)) for x in range(21, 500))
    assert tail > 1e-16 * math.e
    assert charlier_sum_rule(1.0).nodes[-1] > 20


@pytest.mark.parametrize("m,n", [(m, n) for m in range(11) for n in range(11) if m < n])
def test_scalar_orthogonality(m, n):
    cases = [
        (hermite, gauss_rule("hermite", 20)),
        (lambda k: laguerre(k, 1.5), gauss_rule("laguerre", 20, s=1.5)),
        (lambda k: gegenbauer(k, 0.75), gauss_rule("gegenbauer", 20, nu=0.75)),
        (lambda k: charlier(k, 2.0), charlier_sum_rule(2.0)),
    ]
    for poly, q in cases:
        pm, pn = poly(m), poly(n)
        ip = q.integrate(lambda x: pm(x) * pn(x))
        assert abs(ip) < 1e-10 * q.integrate(lambda x: pn(x) ** 2)


def test_hermite_log_derivative():
    # H_1 = -e^{x^2} d/dx e^{-x^2}, so w'/w = -H_1
    rng = np.random.default_rng(3)
    for x in rng.uniform(-3, 3, 10):
        assert -hermite(1)(x) == pytest.approx(-2 * x, abs=1e-12)


@pytest.mark.parametrize("kind,params", [
    ("hermite", {}),
    ("laguerre", {"s": 1.5}),
    ("laguerre", {"s": 3.0}),
    ("gegenbauer", {"nu": 0.5}),
    ("gegenbauer", {"nu": 2.0}),
])
def test_band_rule_matches_full_rule_far_right(kind, params):
    omega = {"hermite": 50.0, "laguerre": 500.0, "gegenbauer": 2.0}[kind]
    band = band_rule(kind, omega, **params)
    full = gauss_rule(kind, 40, **params)
    for p in range(12):
        scale = abs(full.moment(2 * (p // 2 + 1)))
        assert band.moment(p) == pytest.approx(full.moment(p), rel=1e-11, abs=1e-13 * scale)


def test_band_rule_partial_hermite_mass():
    q = band_rule("hermite", 0.3)
    exact = math.sqrt(math.pi) / 2 * (1 + math.erf(0.3))
    assert q.weights.sum() == pytest.approx(exact, rel=1e-13)
    assert q.nodes.max() < 0.3


def test_band_rule_partial_laguerre_mass():
    s, omega = 1.5, 2.6
    q = band_rule("laguerre", omega, s=s)
    exact = special.gammainc(s + 1, omega) * special.gamma(s + 1)
    assert q.weights.sum() == pytest.approx(exact, rel=1e-13)


def test_band_rule_partial_gegenbauer_mass():
    nu, omega = 2.0, 0.15
    q = band_rule("gegenbauer", omega, nu=nu)
    # int_{-1}^{omega} (1 - x^2)^{3/2} dx via the regularized incomplete beta
    e = nu - 0.5
    exact = 2 ** (2 * e + 1) * special.beta(e + 1, e + 1) * special.betainc(e + 1, e + 1, (1 + omega) / 2)
    assert q.weights.sum() == pytest.approx(exact, rel=1e-13)


def test_band_rule_charlier_drops_nodes_at_or_above_omega():
    q = band_rule("charlier", 3.0, a=1.0)
    assert list(q.nodes) == [0.0, 1.0, 2.0]
    assert list(band_rule("charlier", 3.5, a=1.0).nodes) == [0.0, 1.0, 2.0, 3.0]


@pytest.mark.parametrize("kind,omega,params", [
    ("hermite", -20.0, {}),
    ("laguerre", 0.0, {"s": 1.0}),
    ("gegenbauer", -1.0, {"nu": 1.0}),
    ("charlier", 0.0, {"a": 1.0}),
])
def test_empty_band(kind, omega, params):
    with pytest.raises(ValueError):
        band_rule(kind, omega, **params)


def test_weight_cutoff_far_below_double_resolution():
    assert classical.WEIGHT_CUTOFF < 1e-18
