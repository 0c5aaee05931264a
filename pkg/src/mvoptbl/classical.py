"""Scalar classical orthogonal polynomials and quadrature for their weights.

Conventions: physicists' Hermite ``H_n`` (``H_1 = 2x``), standard Laguerre
``L_n^(a)`` (leading coefficient ``(-1)^n / n!``), standard Gegenbauer
``C_n^(nu)``, and Charlier ``c_n(x; a) = 2F0(-n, -x;; -1/a)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.special import gammaln

ScalarPoly = Polynomial

_X = Polynomial([0.0, 1.0])

# Weights below this fraction of their peak are treated as zero when a
# truncated support needs a finite lower end.
WEIGHT_CUTOFF = 1e-30


class QuadratureError(RuntimeError):
    pass


def _check_n(n: int):
    if n < 0:
        raise ValueError(f"polynomial degree must be nonnegative, got {n}")


def hermite(n: int) -> Polynomial:
    _check_n(n)
    p0, p1 = Polynomial([1.0]), Polynomial([0.0, 2.0])
    if n == 0:
        return p0
    for k in range(1, n):
        p0, p1 = p1, 2 * _X * p1 - 2 * k * p0
    return p1


def laguerre(n: int, a: float) -> Polynomial:
    _check_n(n)
    p0, p1 = Polynomial([1.0]), Polynomial([1.0 + a, -1.0])
    if n == 0:
        return p0
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1 + a - _X) * p1 - (k + a) * p0) / (k + 1)
    return p1


def gegenbauer(n: int, nu: float) -> Polynomial:
    _check_n(n)
    p0, p1 = Polynomial([1.0]), Polynomial([0.0, 2.0 * nu])
    if n == 0:
        return p0
    for k in range(1, n):
        p0, p1 = p1, (2 * (k + nu) * _X * p1 - (k + 2 * nu - 1) * p0) / (k + 1)
    return p1


def charlier(n: int, a: float) -> Polynomial:
    if a <= 0:
        raise ValueError("Charlier parameter a must be positive")
    _check_n(n)
    p0, p1 = Polynomial([1.0]), Polynomial([1.0, -1.0 / a])
    if n == 0:
        return p0
    # -x c_n = a c_{n+1} - (n + a) c_n + n c_{n-1}
    for k in range(1, n):
        p0, p1 = p1, ((k + a - _X) * p1 - k * p0) / a
    return p1


@dataclass(frozen=True)
class Quadrature:
    """Nodes and positive weights for ``sum_i w_i f(x_i) ~ int f dmu``.

    ``weight`` names the scalar weight already folded into ``weights``.
    ``exactness`` is the polynomial degree integrated exactly, or ``None``
    for composite or truncated rules.
    """

    nodes: np.ndarray
    weights: np.ndarray
    support: str
    weight: str
    exactness: int | None

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))

    def moment(self, p: int) -> float:
        return float(np.dot(self.weights, self.nodes**p))

    def __len__(self):
        return len(self.nodes)


def jacobi_recurrence(n: int, alpha: float, beta: float):
    """Monic recurrence coefficients for ``(1-x)^alpha (1+x)^beta`` on [-1, 1].

    Returns ``(a, b, mu0)`` with ``a`` of length ``n``, ``b`` of length
    ``n - 1`` (the off-diagonal squares) and ``mu0`` the total mass.
    """
    k = np.arange(n, dtype=float)
    s = alpha + beta
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (beta**2 - alpha**2) / ((2 * k + s) * (2 * k + s + 2))
    a[0] = (beta - alpha) / (s + 2)
    kk = np.arange(1, n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        b = (4 * kk * (kk + alpha) * (kk + beta) * (kk + s)
             / ((2 * kk + s) ** 2 * (2 * kk + s + 1) * (2 * kk + s - 1)))
    if n > 1:
        b[0] = 4 * (1 + alpha) * (1 + beta) / ((2 + s) ** 2 * (3 + s))
    mu0 = math.exp((s + 1) * math.log(2.0) + gammaln(alpha + 1) + gammaln(beta + 1)
                   - gammaln(s + 2))
    return a, b, mu0


def _golub_welsch(a, b, mu0):
    if len(a) == 1:
        return np.array([a[0]]), np.array([mu0])
    try:
        x, v = eigh_tridiagonal(a, np.sqrt(b))
    except LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise QuadratureError(f"tridiagonal eigensolver failed: {exc}") from exc
    return x, mu0 * v[0] ** 2


def gauss_rule(kind: str, n_nodes: int, **params) -> Quadrature:
    """Gauss rule for a classical weight via the Golub-Welsch algorithm.

    ``kind`` is one of ``hermite`` (``exp(-x^2)``), ``laguerre``
    (``x^s exp(-x)``, param ``s``), ``jacobi`` (params ``alpha``, ``beta``)
    or ``gegenbauer`` (``(1-x^2)^(nu-1/2)``, param ``nu``).
    """
    if n_nodes < 1:
        raise ValueError("n_nodes must be at least 1")
    k = np.arange(n_nodes, dtype=float)
    if kind == "hermite":
        a, b, mu0 = np.zeros(n_nodes), k[1:] / 2.0, math.sqrt(math.pi)
        support, weight = "line", "exp(-x^2)"
    elif kind == "laguerre":
        s = float(params["s"])
        if s <= -1:
            raise ValueError("Laguerre exponent must exceed -1")
        a, b, mu0 = 2 * k + s + 1, k[1:] * (k[1:] + s), math.exp(gammaln(s + 1))
        support, weight = "half_line", f"x^{s:g} exp(-x)"
    elif kind in ("jacobi", "gegenbauer"):
        if kind == "gegenbauer":
            al = be = float(params["nu"]) - 0.5
        else:
            al, be = float(params["alpha"]), float(params["beta"])
        if al <= -1 or be <= -1:
            raise ValueError("Jacobi exponents must exceed -1")
        a, b, mu0 = jacobi_recurrence(n_nodes, al, be)
        support, weight = "interval", f"(1-x)^{al:g} (1+x)^{be:g}"
    else:
        raise ValueError(f"unknown Gauss rule kind {kind!r}")
    x, w = _golub_welsch(a, b, mu0)
    return Quadrature(x, w, support, weight, 2 * n_nodes - 1)


def charlier_log_weight(x, a: float):
    x = np.asarray(x, dtype=float)
    return x * math.log(a) - gammaln(x + 1)


def charlier_sum_rule(a: float, tail_tol: float = 1e-16, degree_cap: int = 10) -> Quadrature:
    """Truncated sum over ``x = 0..X_max`` with weights ``a^x / x!``.

    ``X_max`` is the first cut for which the neglected tail of
    ``sum a^x/x! * x^(2*degree_cap)`` is below ``tail_tol * e^a``.
    """
    if a <= 0 or tail_tol <= 0:
        raise ValueError("a and tail_tol must be positive")
    budget = math.log(tail_tol) + a
    p = 2 * degree_cap

    def logterm(x):
        return x * math.log(a) - math.lgamma(x + 1) + (p * math.log(x) if x > 0 else 0.0)

    x = 0
    while True:
        x += 1
        ratio = math.exp(logterm(x + 1) - logterm(x))
        # beyond the peak the ratio decreases, so the tail is geometric-bounded
        if ratio < 0.5 and logterm(x + 1) - math.log1p(-ratio) < budget:
            break
    nodes = np.arange(x + 1, dtype=float)
    weights = np.exp(charlier_log_weight(nodes, a))
    return Quadrature(nodes, weights, "nonnegative_integers", f"{a:g}^x / x!", 2 * degree_cap)


def _gauss_legendre(lo: float, hi: float, n: int):
    t, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * t + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def _endpoint_panel(lo: float, hi: float, beta: float, n: int):
    """Rule for ``int_lo^hi (x - lo)^beta f(x) dx`` with smooth ``f``."""
    t, w = _golub_welsch(*jacobi_recurrence(n, 0.0, beta))
    h = hi - lo
    return lo + 0.5 * h * (1 + t), w * (0.5 * h) ** (beta + 1)


def band_rule(kind: str, omega: float, panels: int = 8, points: int = 40, **params) -> Quadrature:
    """Quadrature for a family's scalar weight restricted to ``x < omega``.

    ``kind`` is ``hermite``, ``laguerre`` (param ``s``), ``gegenbauer``
    (param ``nu``) or ``charlier`` (params ``a`` and optionally
    ``degree_cap``).  The returned weights already include the scalar weight.
    Raises ``ValueError`` for an empty band.
    """
    if kind == "charlier":
        full = charlier_sum_rule(params["a"], degree_cap=params.get("degree_cap", 10))
        keep = full.nodes < omega
        if not keep.any():
            raise ValueError(f"empty band: omega={omega} is at or below the support")
        return Quadrature(full.nodes[keep], full.weights[keep], full.support, full.weight, None)

    if kind == "hermite":
        cut = math.sqrt(-math.log(WEIGHT_CUTOFF))
        lo, hi = -cut, min(omega, cut)
        if omega <= lo:
            raise ValueError(f"empty band: omega={omega} below the numerical support")
        edges = np.linspace(lo, hi, panels + 1)
        xs, ws = zip(*(_gauss_legendre(edges[i], edges[i + 1], points) for i in range(panels)))
        x, w = np.concatenate(xs), np.concatenate(ws)
        return Quadrature(x, w * np.exp(-x * x), "line", "exp(-x^2)", None)

    if kind == "laguerre":
        s = float(params["s"])
        if omega <= 0:
            raise ValueError(f"empty band: omega={omega} at or below 0")
        # x^s e^-x falls below the cutoff well before this point
        hi = min(omega, 40.0 + 3.0 * s - math.log(WEIGHT_CUTOFF))
        edges = np.linspace(0.0, hi, panels + 1)
        x0, w0 = _endpoint_panel(0.0, edges[1], s, points)
        w0 = w0 * np.exp(-x0)
        rest = [_gauss_legendre(edges[i], edges[i + 1], points) for i in range(1, panels)]
        x = np.concatenate([x0] + [r[0] for r in rest])
        w = np.concatenate([w0] + [r[1] * r[0] ** s * np.exp(-r[0]) for r in rest])
        return Quadrature(x, w, "half_line", f"x^{s:g} exp(-x)", None)

    if kind == "gegenbauer":
        nu = float(params["nu"])
        e = nu - 0.5
        if omega <= -1:
            raise ValueError(f"empty band: omega={omega} at or below -1")
        if omega >= 1:
            full = gauss_rule("gegenbauer", points * panels, nu=nu)
            return Quadrature(full.nodes, full.weights, full.support, full.weight, None)
        edges = np.linspace(-1.0, omega, panels + 1)
        x0, w0 = _endpoint_panel(-1.0, edges[1], e, points)
        w0 = w0 * (1 - x0) ** e
        rest = [_gauss_legendre(edges[i], edges[i + 1], points) for i in range(1, panels)]
        x = np.concatenate([x0] + [r[0] for r in rest])
        w = np.concatenate([w0] + [r[1] * (1 - r[0] ** 2) ** e for r in rest])
        return Quadrature(x, w, "interval", f"(1-x^2)^{e:g}", None)

    raise ValueError(f"unknown band rule kind {kind!r}")
