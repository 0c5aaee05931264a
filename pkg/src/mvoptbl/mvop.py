"""Matrix inner products, monic matrix orthogonal polynomials and the
time-limiting projection.

The inner product is ``<F, G> = int F(x) W(x) G(x)^T dmu(x)``, evaluated with
a rule for the family's scalar weight and the polynomial part ``Q`` of
``W = w Q``.  Restricting to ``x < omega`` gives the band-limited product.
"""

from __future__ import annotations

import math
import threading
import weakref
from dataclasses import dataclass, field

import numpy as np

from .classical import Quadrature
from .families import FamilyInstance
from .matcore import DimensionError, MatPoly, max_abs
from .rightops import RightOp, apply

# Largest condition number accepted for a squared norm before inversion.
CONDITION_GUARD = 1e12


class MVOPError(RuntimeError):
    pass


_rule_cache: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()
_rule_lock = threading.Lock()


def default_nodes(degree: int) -> int:
    """Node count for integrating ``w * p`` exactly with ``deg p <= degree``."""
    return max(40, degree // 2 + 2)


def weighted_rule(f: FamilyInstance, band: float | None = None, n_nodes: int = 40,
                  degree_cap: int = 10) -> tuple[Quadrature, np.ndarray]:
    """A rule for ``f``'s scalar weight together with ``Q`` at its nodes.

    Results are cached per family instance.
    """
    key = (band, n_nodes, degree_cap)
    with _rule_lock:
        hit = _rule_cache.get(f, {}).get(key)
    if hit is not None:
        return hit
    if band is None:
        rule = f.quadrature(n_nodes=n_nodes, degree_cap=degree_cap)
    else:
        rule = f.band_quadrature(band, degree_cap=degree_cap)
    hit = (rule, f.Q(rule.nodes))
    with _rule_lock:
        _rule_cache.setdefault(f, {})[key] = hit
    return hit


def _rule_for(f: FamilyInstance, degree: int, band: float | None, n_nodes: int | None):
    if n_nodes is None:
        n_nodes = default_nodes(degree)
    cap = max(10, math.ceil(degree / 2) + 1)
    return weighted_rule(f, band, n_nodes, cap)


def _integrand_degree(f: FamilyInstance, *polys: MatPoly) -> int:
    return int(sum(max(p.degree, 0) for p in polys)) + 2 * f.N - 2


def inner(f: FamilyInstance, F: MatPoly, G: MatPoly, band: float | None = None,
          n_nodes: int | None = None) -> np.ndarray:
    """``<F, G> = int F W G^T``, optionally restricted to ``x < band``.

    Raises ``ValueError`` for an empty band.
    """
    if F.shape[1] != f.N or G.shape[1] != f.N:
        raise DimensionError(f"inner product needs {f.N} columns, got {F.shape} and {G.shape}")
    rule, Qn = _rule_for(f, _integrand_degree(f, F, G), band, n_nodes)
    return np.einsum("k,kij,kjl,kml->im", rule.weights, F(rule.nodes), Qn, G(rule.nodes))


@dataclass
class MVOPSeq:
    """Monic ``P_0..P_nmax`` with squared norms ``H_n = <P_n, P_n>``."""

    family: FamilyInstance
    n_max: int
    P: list = field(default_factory=list)
    H: list = field(default_factory=list)
    n_nodes: int = 40

    def inner(self, F: MatPoly, G: MatPoly, band: float | None = None) -> np.ndarray:
        return inner(self.family, F, G, band, self.n_nodes)

    def H_inv(self, n: int) -> np.ndarray:
        return np.linalg.inv(self.H[n])

    def orthogonality_residual(self, n_cap: int | None = None, symmetric: bool = False) -> float:
        """``max_{m != n} ||<P_m, P_n>||_inf / ||H_n||_inf``.

        With ``symmetric=True`` the divisor is ``sqrt(||H_m||_inf ||H_n||_inf)``,
        which does not depend on how fast the norms grow with ``n``.
        """
        n_cap = self.n_max if n_cap is None else n_cap
        worst = 0.0
        for n in range(n_cap + 1):
            for m in range(n_cap + 1):
                if m != n:
                    den = max_abs(self.H[n])
                    if symmetric:
                        den = math.sqrt(den * max_abs(self.H[m]))
                    worst = max(worst, max_abs(self.inner(self.P[m], self.P[n])) / den)
        return worst

    def min_norm_eigenvalue(self) -> float:
        """Smallest eigenvalue over all ``H_n``, relative to ``||H_n||``."""
        return min(float(np.linalg.eigvalsh(h)[0] / max_abs(h)) for h in self.H)

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "P": [p.to_list() for p in self.P],
            "H": [h.tolist() for h in self.H],
        }


def generate_mvop(f: FamilyInstance, n_max: int, n_nodes: int | None = None) -> MVOPSeq:
    """Monic MVOP by block Gram-Schmidt.

    Each new ``P_n`` starts from ``x P_(n-1)`` (same leading block as
    ``x^n I``, much better conditioned than the bare monomial) and is
    orthogonalized against all earlier ``P_k`` twice.  Raises
    :class:`MVOPError` when some ``H_n`` is not numerically positive definite.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    N = f.N
    if n_nodes is None:
        n_nodes = max(40, n_max + 2 * N + 5)
    seq = MVOPSeq(f, n_max, n_nodes=n_nodes)
    x = MatPoly.monomial(1, np.eye(N))
    for n in range(n_max + 1):
        V = MatPoly.identity(N) if n == 0 else x @ seq.P[-1]
        before = max_abs(seq.inner(V, V))
        for _ in range(2):
            for k in range(n):
                V = V - (seq.inner(V, seq.P[k]) @ seq.H_inv(k)) @ seq.P[k]
        # removing lower-degree parts leaves the leading block exactly I
        H = seq.inner(V, V)
        H = 0.5 * (H + H.T)
        eig = np.linalg.eigvalsh(H)
        if eig[0] <= 0 or eig[-1] / eig[0] > CONDITION_GUARD:
            raise MVOPError(f"squared norm H_{n} of {f.kind} N={N} is singular or ill-conditioned "
                            f"(eigenvalues {eig[0]:.3e}..{eig[-1]:.3e})")
        # a norm that cancels almost completely means the rule cannot resolve degree n
        if max_abs(H) * CONDITION_GUARD < before:
            raise MVOPError(f"squared norm H_{n} of {f.kind} N={N} lost to cancellation "
                            f"({max_abs(H):.3e} from {before:.3e}); use more nodes")
        seq.P.append(V)
        seq.H.append(H)
    return seq


def time_limit(seq: MVOPSeq, F: MatPoly, M: int) -> MatPoly:
    """``sum_{n <= M} <F, P_n> H_n^-1 P_n``."""
    if M > seq.n_max or M < 0:
        raise ValueError(f"M={M} outside the generated range 0..{seq.n_max}")
    out = MatPoly.zeros(F.shape[0], seq.family.N)
    for n in range(M + 1):
        out = out + (seq.inner(F, seq.P[n]) @ seq.H_inv(n)) @ seq.P[n]
    return out


def basis_matrix_of(seq: MVOPSeq, op: RightOp, n_cap: int) -> np.ndarray:
    """Block matrix with ``B[m, n] = <P_m . op, P_n> H_n^-1`` for ``m, n <= n_cap``."""
    if n_cap + 1 > seq.n_max:
        raise ValueError(f"n_cap={n_cap} needs MVOP up to degree {n_cap + 1}, have {seq.n_max}")
    N = seq.family.N
    B = np.zeros(((n_cap + 1) * N, (n_cap + 1) * N))
    for m in range(n_cap + 1):
        image = apply(op, seq.P[m])
        for n in range(n_cap + 1):
            B[m * N:(m + 1) * N, n * N:(n + 1) * N] = seq.inner(image, seq.P[n]) @ seq.H_inv(n)
    return B
