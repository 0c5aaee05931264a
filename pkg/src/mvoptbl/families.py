"""Matrix weight families and their strong Pearson data.

Every weight is stored in the factored form ``W(x) = L(x) T(x) L(x)^T`` with
``L`` unit lower triangular and ``T(x) = w(x) * Tpoly(x)`` diagonal, where
``w`` is the scalar weight common to all entries.  Then ``W = w * Q`` with
``Q = L Tpoly L^T`` a matrix polynomial of degree ``2N - 2``.

Kinds: ``hermite``, ``laguerre``, ``gegenbauer``, ``charlier`` (weights with
strong Pearson equations ``W^(nu+1) = W^(nu) Phi`` and
``d/dx W^(nu+1) = W^(nu) Psi``, or the backward difference for Charlier) and
``hermite_free`` (Hermite-type weight with free positive parameters and no
Pearson data).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import gamma, poch, rgamma

from . import classical
from .matcore import MatPoly, diag_poly, max_abs

KINDS = ("hermite", "laguerre", "gegenbauer", "charlier", "hermite_free")
PARAM_SETS = {"hermite": (1, 2, 3), "laguerre": (1, 2, 3)}
SUPPORTS = {
    "hermite": "line",
    "hermite_free": "line",
    "laguerre": "half_line",
    "gegenbauer": "interval",
    "charlier": "nonnegative_integers",
}


class FamilyError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FamilyInstance:
    kind: str
    N: int
    nu: float | None
    set_id: int | None
    params: dict
    L: MatPoly
    Tpoly: MatPoly
    Q: MatPoly
    A: np.ndarray
    phi: tuple | None = None  # (phi2, phi1, phi0)
    psi: tuple | None = None  # (psi1, psi0)
    options: dict = field(default_factory=dict)

    @property
    def support(self) -> str:
        return SUPPORTS[self.kind]

    @property
    def has_pearson(self) -> bool:
        return self.phi is not None

    @property
    def is_discrete(self) -> bool:
        return self.kind == "charlier"

    @property
    def J(self) -> np.ndarray:
        return np.diag(np.arange(1.0, self.N + 1))

    def Phi(self) -> MatPoly:
        self._need_pearson()
        return MatPoly(np.stack(self.phi[::-1]))

    def Psi(self) -> MatPoly:
        self._need_pearson()
        return MatPoly(np.stack(self.psi[::-1]))

    def _need_pearson(self):
        if self.phi is None:
            raise FamilyError(f"{self.kind} has no strong Pearson data")

    # -- scalar weight ------------------------------------------------------
    @property
    def weight_name(self) -> str:
        return {
            "hermite": "exp(-x^2)",
            "hermite_free": "exp(-x^2)",
            "laguerre": f"x^{self.nu + 1:g} exp(-x)",
            "gegenbauer": f"(1-x^2)^{self.nu - 0.5:g}",
            "charlier": f"{self.params.get('a', 0):g}^x / x!",
        }[self.kind]

    def scalar_weight(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind in ("hermite", "hermite_free"):
            return np.exp(-x * x)
        if self.kind == "laguerre":
            return np.where(x > 0, np.abs(x) ** (self.nu + 1) * np.exp(-x), 0.0)
        if self.kind == "gegenbauer":
            return np.clip(1 - x * x, 0.0, None) ** (self.nu - 0.5)
        a = self.params["a"]
        return a**x * rgamma(x + 1)

    def scalar_log_derivative(self, x):
        """``w'(x) / w(x)`` for the continuous families."""
        x = np.asarray(x, dtype=float)
        if self.kind in ("hermite", "hermite_free"):
            return -2 * x
        if self.kind == "laguerre":
            return (self.nu + 1) / x - 1
        if self.kind == "gegenbauer":
            return -2 * x * (self.nu - 0.5) / (1 - x * x)
        raise FamilyError("the Charlier weight is discrete")

    def quadrature(self, n_nodes: int = 40, degree_cap: int = 10) -> classical.Quadrature:
        """Rule integrating ``w(x) p(x)`` exactly (or to rounding) for
        polynomials ``p`` of degree up to ``2 * n_nodes - 1`` (Charlier:
        ``2 * degree_cap``)."""
        if self.kind in ("hermite", "hermite_free"):
            return classical.gauss_rule("hermite", n_nodes)
        if self.kind == "laguerre":
            return classical.gauss_rule("laguerre", n_nodes, s=self.nu + 1)
        if self.kind == "gegenbauer":
            return classical.gauss_rule("gegenbauer", n_nodes, nu=self.nu)
        return classical.charlier_sum_rule(self.params["a"], degree_cap=degree_cap)

    def band_quadrature(self, omega: float, degree_cap: int = 10) -> classical.Quadrature:
        kind = "hermite" if self.kind == "hermite_free" else self.kind
        if kind == "laguerre":
            return classical.band_rule(kind, omega, s=self.nu + 1)
        if kind == "gegenbauer":
            return classical.band_rule(kind, omega, nu=self.nu)
        if kind == "charlier":
            return classical.band_rule(kind, omega, a=self.params["a"], degree_cap=degree_cap)
        return classical.band_rule(kind, omega)

    def sample_points(self) -> np.ndarray:
        """Points inside the support for pointwise identity checks."""
        if self.kind == "charlier":
            return np.arange(0.0, 2 * self.N + 7)
        n = 2 * (2 * self.N + 3)
        cheb = np.cos((2 * np.arange(1, n + 1) - 1) * np.pi / (2 * n))[::-1]
        if self.kind == "laguerre":
            return 5.0 * (1 + cheb)
        if self.kind == "gegenbauer":
            return cheb
        return 3.0 * cheb

    def shifted(self) -> FamilyInstance:
        """The same family at ``nu + 1`` (Laguerre keeps its ``a``)."""
        self._need_pearson()
        extras = {k: self.params[k] for k in ("lam", "rho", "C", "a") if k in self.params}
        return build_family(self.kind, self.N, self.nu + 1, self.set_id, **extras, **self.options)

    def to_dict(self) -> dict:
        def m(a):
            return np.asarray(a, dtype=float).tolist()

        out = {
            "kind": self.kind,
            "N": self.N,
            "nu": self.nu,
            "set": self.set_id,
            "support": self.support,
            "scalar_weight": self.weight_name,
            "params": {k: (m(v) if isinstance(v, np.ndarray) else v) for k, v in self.params.items()},
            "L": self.L.to_list(),
            "Q": self.Q.to_list(),
        }
        if self.phi is not None:
            out["phi"] = {"phi2": m(self.phi[0]), "phi1": m(self.phi[1]), "phi0": m(self.phi[2])}
            out["psi"] = {"psi1": m(self.psi[0]), "psi0": m(self.psi[1])}
        return out


# -- parameter tables -------------------------------------------------------

def hermite_params(N: int, nu: float, set_id: int, lam: float = 1.0, rho: float = 1.0,
                   C: float = 0.5):
    k = np.arange(1, N + 1)
    if set_id == 1:
        d, c = 1 / (nu + 1), nu / (nu + 1)
        alpha = np.sqrt(2.0 ** (1 - k) * poch(N - k + 1, k - 1))
        t = poch(nu + 1, k - 1) / gamma(k)
    elif set_id == 2:
        d, c = lam, lam * nu
        alpha = 2.0 ** (1 - k) * np.sqrt(gamma(k) * poch(N - k + 1, k - 1))
        t = 2.0 ** (-k) * lam**nu * gamma(nu + k)
    elif set_id == 3:
        d, c = rho, C + nu * rho
        alpha = np.ones(N)
        g = nu + 1 + C / rho
        t = 2.0 ** (k - 1) * poch(g, k - 1) / (gamma(k) * poch(N - k + 1, k - 1)) * gamma(g)
    else:
        raise FamilyError(f"unknown Hermite parameter set {set_id}")
    return d, c, alpha, t


def laguerre_params(N: int, nu: float, set_id: int, lam: float = 1.0, rho: float = 1.0,
                    C: float = 0.5):
    k = np.arange(1, N + 1)
    if set_id == 1:
        d, c = 1.0, nu
        alpha = np.sqrt(poch(N - k + 1, k))
        t = np.array([gamma(nu + 1) * np.prod(1 + nu / np.arange(1, kk)) for kk in k])
    elif set_id == 2:
        d, c = lam, lam * nu
        alpha = np.sqrt(gamma(k) * poch(N - k + 1, k - 1))
        t = lam**nu * gamma(nu + k)
    elif set_id == 3:
        d, c = rho, C + nu * rho
        alpha = np.ones(N)
        g = nu + 1 + C / rho
        t = poch(g, k - 1) / (gamma(k) * poch(N - k + 1, k - 1)) * rho**nu * gamma(g)
    else:
        raise FamilyError(f"unknown Laguerre parameter set {set_id}")
    return d, c, alpha, t


def gegenbauer_t(N: int, nu: float) -> np.ndarray:
    ell = (N - 1) / 2
    k = np.arange(N)
    return (gamma(k + 1) * poch(nu, k) / poch(nu + 0.5, k) * poch(2 * nu + 2 * ell, k)
            * (2 * ell + nu) / (poch(2 * ell - k + 1, k) * poch(2 * nu + k - 1, k)))


def charlier_alpha(N: int, a: float) -> np.ndarray:
    # (alpha_j / alpha_{j-1})^2 = (N - j + 1) / a, alpha_1 = 1
    ratios = np.sqrt((N - np.arange(2, N + 1) + 1) / a)
    return np.concatenate([[1.0], np.cumprod(ratios)])


def charlier_t(N: int, nu: int, a: float) -> np.ndarray:
    return (a / 2) ** nu * poch(np.arange(1, N + 1), nu)


# -- polynomial building blocks ----------------------------------------------

def _lower_poly(N: int, entry) -> MatPoly:
    grid = [[entry(j, k) if j >= k else [0.0] for k in range(N)] for j in range(N)]
    return MatPoly.from_entries(grid)


def _subdiag(values) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    return np.diag(values, -1) if values.size else np.zeros((1, 1))


def _binomial_poly(shift: float, m: int) -> Polynomial:
    """``binom(x + shift, m)`` as a polynomial in ``x``."""
    p = Polynomial([1.0])
    for i in range(m):
        p = p * Polynomial([shift - i, 1.0])
    return p / math.factorial(m)


def nilpotent_binomial_power(A, shift: float = 0.0, tol: float = 1e-12) -> MatPoly:
    """``(I + A)^(x + shift)`` for nilpotent ``A``, as a polynomial in ``x``.

    Expands as ``sum_{m < N} binom(x + shift, m) A^m``.
    """
    A = np.asarray(A, dtype=float)
    N = A.shape[0]
    scale = max(1.0, max_abs(A))
    if max_abs(np.linalg.matrix_power(A / scale, N)) > tol:
        raise FamilyError("matrix is not nilpotent")
    out = MatPoly.zeros(N)
    Am = np.eye(N)
    for m in range(N):
        out = out + MatPoly(np.einsum("p,ij->pij", _binomial_poly(shift, m).coef, Am))
        Am = Am @ A
    return out


def charlier_weight_poly(f: FamilyInstance) -> MatPoly:
    """Polynomial part ``Q`` of the Charlier weight; ``W(x) = a^x/x! Q(x)``."""
    if f.kind != "charlier":
        raise FamilyError("not a Charlier family")
    return f.Q


def charlier_L(N: int, a: float) -> MatPoly:
    """The lower triangular ``L(x)`` with entries built from Charlier
    polynomials; it satisfies ``L(x + 1) = L(x) (I + A)``."""
    alpha = charlier_alpha(N, a)
    return _lower_poly(N, lambda j, k: ((-a) ** (j - k) * alpha[j] / alpha[k]
                                        * classical.charlier(j - k, a) / math.factorial(j - k)))


# -- family construction ------------------------------------------------------

def _check_common(N, nu, positive_nu=True):
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise FamilyError(f"matrix size must be a positive integer, got {N!r}")
    if positive_nu and (nu is None or not nu > 0):
        raise FamilyError(f"nu must be positive, got {nu!r}")


def build_family(kind: str, N: int, nu: float | None = None, set_id: int | None = None,
                 **extra) -> FamilyInstance:
    """Construct a weight family instance.

    Extra keyword parameters, where applicable: ``lam`` (set 2), ``rho`` and
    ``C`` (set 3), ``a`` (Charlier parameter, or the Laguerre parameter of
    ``L``; defaults to ``nu`` there), ``alpha`` and ``t`` (``hermite_free``).
    ``phi0_ell_sign`` (Gegenbauer) is the sign of the ``2 ell I`` term in
    ``phi_0``; only the default ``-1`` satisfies the Pearson equations for
    ``N > 1``.
    """
    if kind not in KINDS:
        raise FamilyError(f"unknown family {kind!r}; choose from {', '.join(KINDS)}")
    if kind in PARAM_SETS and set_id not in PARAM_SETS[kind]:
        raise FamilyError(f"{kind} needs a parameter set in {PARAM_SETS[kind]}, got {set_id!r}")
    for key in ("lam", "rho", "a"):
        if key == "a" and kind == "laguerre":
            continue
        if extra.get(key) is not None and not extra[key] > 0:
            raise FamilyError(f"{key} must be positive")
    if extra.get("C") is not None and extra["C"] < 0:
        raise FamilyError("C must be nonnegative")
    extra = {k: v for k, v in extra.items() if v is not None}
    builder = {
        "hermite": _build_hermite,
        "laguerre": _build_laguerre,
        "gegenbauer": _build_gegenbauer,
        "charlier": _build_charlier,
        "hermite_free": _build_hermite_free,
    }[kind]
    return builder(N, nu, set_id, **extra)


def _hermite_L(alpha) -> MatPoly:
    N = len(alpha)
    return _lower_poly(N, lambda j, k: alpha[j] / alpha[k] * classical.hermite(j - k)
                       / math.factorial(j - k))


def _build_hermite(N, nu, set_id, lam=1.0, rho=1.0, C=0.5):
    _check_common(N, nu)
    d, c, alpha, t = hermite_params(N, nu, set_id, lam, rho, C)
    I, J = np.eye(N), np.diag(np.arange(1.0, N + 1))
    A = _subdiag(2 * alpha[1:] / alpha[:-1]) if N > 1 else np.zeros((1, 1))
    At = _subdiag(2 * alpha[:-1] / alpha[1:]) if N > 1 else np.zeros((1, 1))
    As = A.T
    phi2 = np.zeros((N, N))
    phi1 = -d * As
    phi0 = d * (J + 0.5 * As @ As) + c * I
    psi1 = 2 * (d * (J - (N + 1) * I) - c * I)
    psi0 = As @ (c * I + d * ((N + 1) * I - J)) + 0.5 * d * At @ J @ (N * I - J)
    L = _hermite_L(alpha)
    Tpoly = MatPoly.constant(np.diag(t))
    params = dict(d=d, c=c, alpha=alpha, t=t)
    params.update({"lam": lam} if set_id == 2 else {"rho": rho, "C": C} if set_id == 3 else {})
    return FamilyInstance("hermite", N, float(nu), set_id, params, L, Tpoly, L @ Tpoly @ L.T, A,
                          (phi2, phi1, phi0), (psi1, psi0))


def _build_hermite_free(N, nu=None, set_id=None, alpha=None, t=None):
    _check_common(N, nu, positive_nu=False)
    alpha = np.ones(N) if alpha is None else np.asarray(alpha, dtype=float)
    t = np.arange(1.0, N + 1) if t is None else np.asarray(t, dtype=float)
    if alpha.shape != (N,) or t.shape != (N,):
        raise FamilyError(f"alpha and t must have length {N}")
    if np.any(alpha <= 0) or np.any(t <= 0):
        raise FamilyError("alpha and t must be strictly positive")
    A = _subdiag(2 * alpha[1:] / alpha[:-1]) if N > 1 else np.zeros((1, 1))
    L = _hermite_L(alpha)
    Tpoly = MatPoly.constant(np.diag(t))
    return FamilyInstance("hermite_free", N, None, None, dict(alpha=alpha, t=t), L, Tpoly,
                          L @ Tpoly @ L.T, A)


def _build_laguerre(N, nu, set_id, lam=1.0, rho=1.0, C=0.5, a=None):
    _check_common(N, nu)
    a = float(nu) if a is None else float(a)
    if a <= -1:
        raise FamilyError("the Laguerre parameter a of L must exceed -1")
    d, c, alpha, t = laguerre_params(N, nu, set_id, lam, rho, C)
    t_next = laguerre_params(N, nu + 1, set_id, lam, rho, C)[3]
    I, J = np.eye(N), np.diag(np.arange(1.0, N + 1))
    A = _subdiag(-alpha[1:] / alpha[:-1]) if N > 1 else np.zeros((1, 1))
    As = A.T
    # column k (1-based) carries Laguerre parameter a + k
    L = _lower_poly(N, lambda j, k: alpha[j] / alpha[k] * classical.laguerre(j - k, a + k + 1))
    L0s = L(0.0).T
    L0si = np.linalg.inv(L0s)
    phi2 = -d * L0si @ As @ L0s
    phi1 = d * L0si @ J @ L0s + c * I
    phi0 = np.zeros((N, N))
    psi1 = d * L0si @ (J - As @ (J + (nu + 1) * I)) @ L0s - (d * (N + 1) + c) * I
    psi0 = L0si @ ((J + (nu + 1) * I) @ (d * J + c * I)
                   + np.diag(1 / t) @ A @ np.diag(t_next)) @ L0s
    # T_jj = t_j x^(nu+j) e^-x = x^(nu+1) e^-x * t_j x^(j-1)
    Tpoly = diag_poly([[0.0] * j + [t[j]] for j in range(N)])
    params = dict(d=d, c=c, alpha=alpha, t=t, a=a)
    params.update({"lam": lam} if set_id == 2 else {"rho": rho, "C": C} if set_id == 3 else {})
    return FamilyInstance("laguerre", N, float(nu), set_id, params, L, Tpoly, L @ Tpoly @ L.T, A,
                          (phi2, phi1, phi0), (psi1, psi0))


def _build_gegenbauer(N, nu, set_id=None, phi0_ell_sign=-1):
    _check_common(N, nu)
    if phi0_ell_sign not in (-1, 1):
        raise FamilyError("phi0_ell_sign must be -1 or 1")
    ell = (N - 1) / 2
    t = gegenbauer_t(N, nu)
    I = np.eye(N)
    J = np.diag(np.arange(float(N)))  # indices 0..2*ell
    A = _subdiag(np.ones(N - 1)) if N > 1 else np.zeros((1, 1))
    As = A.T
    # c / ell^2, finite at ell = 0
    cr = (2 * nu + 1) * (2 * ell + nu + 1) / (nu * (2 * nu + 2 * ell + 1) * (2 * ell + nu) * (ell + nu))
    K1 = -(2 * ell + 2 * nu + 1) * (J + nu * I) @ ((2 * ell + nu) * I - J)  # ell^2 K_1
    phi2 = cr / (2 * ell + 2 * nu + 1) * K1
    psi1 = cr * K1
    phi1 = cr / 2 * (((2 * ell + 1) * I - 2 * J) @ (J - (2 * ell + 1) * I) @ A
                     + ((2 * ell - 1) * I - 2 * J) @ As @ J)
    ell_term = 2 * ell * phi0_ell_sign
    phi0 = cr / 4 * (4 * (ell + nu) ** 2 * I
                     + ((2 * ell + 2) * I - J) @ ((2 * ell + 1) * I - J) @ A @ A
                     + 2 * J @ J - 4 * ell * J + ell_term * I + (As @ J) @ (As @ J))
    psi0 = cr * (2 * ell + 1 + 2 * nu) / (-2) * (A @ (J - 2 * ell * I) @ (J + nu * I)
                                                  - As @ J @ ((2 * ell + nu) * I - J))

    def entry(j, k):
        beta = math.factorial(j) / (math.factorial(k) * poch(2 * nu + 2 * k, j - k))
        return beta * classical.gegenbauer(j - k, nu + k)

    L = _lower_poly(N, entry)
    one_minus_x2 = Polynomial([1.0, 0.0, -1.0])
    Tpoly = diag_poly([t[j] * one_minus_x2**j for j in range(N)])
    options = {} if phi0_ell_sign == -1 else {"phi0_ell_sign": phi0_ell_sign}
    return FamilyInstance("gegenbauer", N, float(nu), None, dict(t=t, ell=ell, c_over_ell2=cr),
                          L, Tpoly, L @ Tpoly @ L.T, A, (phi2, phi1, phi0), (psi1, psi0),
                          options)


def _build_charlier(N, nu, set_id=None, a=None):
    _check_common(N, nu, positive_nu=False)
    if nu is None or nu < 0 or int(nu) != nu:
        raise FamilyError(f"Charlier nu must be a nonnegative integer, got {nu!r}")
    if a is None or not a > 0:
        raise FamilyError("Charlier family needs a > 0")
    nu = int(nu)
    alpha = charlier_alpha(N, a)
    I, J = np.eye(N), np.diag(np.arange(1.0, N + 1))
    A = _subdiag(alpha[1:] / alpha[:-1]) if N > 1 else np.zeros((1, 1))
    As = A.T
    t, t_next = charlier_t(N, nu, a), charlier_t(N, nu + 1, a)
    inv = np.linalg.inv(As + I)
    phi2 = -0.5 * As @ inv
    phi1 = 0.5 * (2 * J - (N + 1) * I - a * As - (2 * nu + 1) * As @ inv)
    phi0 = (np.linalg.matrix_power(inv, nu) @ np.diag(1 / t) @ (A + I) @ np.diag(t_next)
            @ np.linalg.matrix_power(As + I, nu + 1))
    psi1 = 0.5 * (J - (N + 1 + nu) * I - a * As - (nu + 1) * As @ inv)
    psi0 = phi0.copy()
    L = nilpotent_binomial_power(A, nu)
    Tpoly = MatPoly.constant(np.diag(t))
    return FamilyInstance("charlier", N, nu, None, dict(a=float(a), alpha=alpha, t=t), L, Tpoly,
                          L @ Tpoly @ L.T, A, (phi2, phi1, phi0), (psi1, psi0))


# -- evaluation and identity checks -----------------------------------------------

def _check_support(f: FamilyInstance, x: float):
    if f.kind == "laguerre" and x < 0:
        raise FamilyError(f"x={x} outside the half line")
    if f.kind == "gegenbauer" and not -1 <= x <= 1:
        raise FamilyError(f"x={x} outside [-1, 1]")
    if f.kind == "charlier" and (x < 0 or x != int(x)):
        raise FamilyError(f"x={x} is not a nonnegative integer")


def _weight(f: FamilyInstance, x: float) -> np.ndarray:
    return float(f.scalar_weight(x)) * f.Q(x)


def weight_eval(f: FamilyInstance, x: float) -> np.ndarray:
    """``W(x) = w(x) Q(x)``; raises :class:`FamilyError` off the support."""
    _check_support(f, x)
    return _weight(f, x)


def weight_from_factors(f: FamilyInstance, x: float) -> np.ndarray:
    """``L(x) T(x) L(x)^T`` recomposed from the stored factors."""
    L = f.L(x)
    return float(f.scalar_weight(x)) * L @ f.Tpoly(x) @ L.T


def weight_derivative(f: FamilyInstance, x: float) -> np.ndarray:
    """Analytic ``W'(x)`` by the product rule over ``L``, ``T`` and ``L^T``."""
    if f.is_discrete:
        raise FamilyError("the Charlier weight has no derivative")
    L, dL = f.L(x), f.L.derivative()(x)
    T = f.Tpoly(x)
    dT = f.Tpoly.derivative()(x) + float(f.scalar_log_derivative(x)) * T
    return float(f.scalar_weight(x)) * (dL @ T @ L.T + L @ dT @ L.T + L @ T @ dL.T)


def _rel(num: np.ndarray, den: float) -> float:
    return max_abs(num) / den if den > 0 else max_abs(num)


def pearson_residuals(f: FamilyInstance) -> tuple[float, float]:
    """Normalized residuals of both strong Pearson equations over the sample
    grid: ``||W1 - W Phi|| / ||W1||`` and the derivative (or backward
    difference) analogue, with ``W1`` the weight at ``nu + 1``."""
    if not f.has_pearson:
        raise FamilyError(f"{f.kind} has no strong Pearson equations")
    g = f.shifted()
    Phi, Psi = f.Phi(), f.Psi()
    res_phi = res_psi = 0.0
    for x in f.sample_points():
        W, W1 = _weight(f, x), _weight(g, x)
        scale = max_abs(W1)
        res_phi = max(res_phi, _rel(W1 - W @ Phi(x), scale))
        if f.is_discrete:
            lhs = W1 - _weight(g, x - 1)
        else:
            lhs = weight_derivative(g, x)
        res_psi = max(res_psi, _rel(lhs - W @ Psi(x), scale))
    return res_phi, res_psi


def switching_residual(f: FamilyInstance) -> float:
    """Largest normalized ``W Phi - Phi^T W`` and ``W Psi - Psi^T W`` residual."""
    if not f.has_pearson:
        raise FamilyError(f"{f.kind} has no strong Pearson equations")
    Phi, Psi = f.Phi(), f.Psi()
    res = 0.0
    for x in f.sample_points():
        W = _weight(f, x)
        for P in (Phi(x), Psi(x)):
            res = max(res, _rel(W @ P - P.T @ W, max_abs(W) * max_abs(P)))
    return res


def family_catalog() -> list[dict]:
    """Available families and parameter sets, for listings."""
    return [
        {"kind": "hermite", "sets": [1, 2, 3], "extras": "lam (set 2); rho, C (set 3)",
         "support": "line", "scalar_weight": "exp(-x^2)"},
        {"kind": "laguerre", "sets": [1, 2, 3], "extras": "a (L parameter, default nu); lam; rho, C",
         "support": "half_line", "scalar_weight": "x^(nu+1) exp(-x)"},
        {"kind": "gegenbauer", "sets": [], "extras": "N = 2 ell + 1",
         "support": "interval", "scalar_weight": "(1-x^2)^(nu-1/2)"},
        {"kind": "charlier", "sets": [], "extras": "a > 0, integer nu >= 0",
         "support": "nonnegative_integers", "scalar_weight": "a^x / x!"},
        {"kind": "hermite_free", "sets": [], "extras": "alpha, t (positive; default 1 and j)",
         "support": "line", "scalar_weight": "exp(-x^2)"},
    ]

