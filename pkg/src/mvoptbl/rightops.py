"""Right-acting second-order differential and difference operators.

A differential operator with coefficients ``c[k]`` acts as
``(F . D)(x) = sum_k F^(k)(x) c[k](x)``; a difference operator with
coefficients ``g[h]`` acts as ``(F . D)(x) = sum_h F(x + h) g[h](x)``.
Coefficients always multiply from the right.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .families import FamilyError, FamilyInstance
from .matcore import DimensionError, MatPoly, x_times

DIFFERENTIAL = "differential"
DIFFERENCE = "difference"


@dataclass(frozen=True)
class RightOp:
    flavor: str
    N: int
    terms: dict  # derivative order or shift -> MatPoly

    def __post_init__(self):
        if self.flavor not in (DIFFERENTIAL, DIFFERENCE):
            raise ValueError(f"unknown operator flavor {self.flavor!r}")
        for k, c in self.terms.items():
            if c.shape != (self.N, self.N):
                raise DimensionError(f"coefficient {k} has shape {c.shape}, expected {self.N}")

    def coefficient(self, k: int) -> MatPoly:
        return self.terms.get(k, MatPoly.zeros(self.N))

    def __call__(self, F: MatPoly) -> MatPoly:
        return apply(self, F)

    def max_coeff_degree(self) -> int:
        return max((c.degree for c in self.terms.values() if not c.is_zero()), default=0)


def apply(op: RightOp, F: MatPoly) -> MatPoly:
    """``F . op`` as an exact matrix polynomial."""
    if F.shape[1] != op.N:
        raise DimensionError(f"cannot apply a size-{op.N} operator to shape {F.shape}")
    out = MatPoly.zeros(F.shape[0], op.N)
    for k, c in op.terms.items():
        if op.flavor == DIFFERENTIAL:
            G = F
            for _ in range(k):
                G = G.derivative()
        else:
            G = F.shift(k)
        out = out + G @ c
    return out


def build_pearson_D(f: FamilyInstance) -> RightOp:
    """The operator whose eigenfunctions are the monic MVOP, built from the
    Pearson data: ``d^2 Phi^T + d Psi^T`` (continuous) or
    ``-Delta nabla Phi^T - nabla Psi^T`` (Charlier)."""
    if not f.has_pearson:
        raise FamilyError(f"{f.kind} has no Pearson operator")
    Phis, Psis = f.Phi().T, f.Psi().T
    if not f.is_discrete:
        return RightOp(DIFFERENTIAL, f.N, {2: Phis, 1: Psis})
    # -(F(x+1) - 2F(x) + F(x-1)) Phi* - (F(x) - F(x-1)) Psi*
    return RightOp(DIFFERENCE, f.N, {1: -Phis, 0: 2 * Phis - Psis, -1: Psis - Phis})


def build_free_D(f: FamilyInstance) -> RightOp:
    """``-1/2 d^2 + d (xI - A) + J`` for the free Hermite-type weight."""
    if f.kind != "hermite_free":
        raise FamilyError("the free operator belongs to the hermite_free family")
    N = f.N
    return RightOp(DIFFERENTIAL, N, {
        2: MatPoly.constant(-0.5 * np.eye(N)),
        1: x_times(N) - f.A,
        0: MatPoly.constant(f.J),
    })


def family_operator(f: FamilyInstance) -> RightOp:
    return build_free_D(f) if f.kind == "hermite_free" else build_pearson_D(f)


def eigenvalue_matrix(f: FamilyInstance, n: int) -> np.ndarray:
    """``Lambda_n`` with ``P_n . D = Lambda_n P_n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if f.kind == "hermite_free":
        return n * np.eye(f.N) + f.J
    phi2, psi1 = f.phi[0], f.psi[0]
    lam = n * (n - 1) * phi2.T + n * psi1.T
    return -lam if f.is_discrete else lam

