"""Commuting operators for matrix time and band limiting.

For a level ``M`` and band edge ``omega`` the operator

    T = x D + D (x - 2 omega) - x Sigma + R,   Sigma = Lambda_M + Lambda_(M+1),

acts on the right.  It commutes with both limiting operators once the
constant matrix ``R`` satisfies ``(R - x Sigma) W = W (R - x Sigma)^T``.
This module holds closed forms for ``R``, a generic linear solver for it,
the assembly of ``T`` and numerical commutation checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .families import FamilyError, FamilyInstance, build_family
from .matcore import MatPoly, max_abs, solve_least_squares, x_times
from .mvop import MVOPSeq, inner
from .rightops import DIFFERENCE, DIFFERENTIAL, RightOp, apply, eigenvalue_matrix, family_operator

TOL_CONSISTENT = 1e-8
TOL_INCONSISTENT = 1e-3
# Equation rows this small relative to the system are treated as zero.
ZERO_ROW = 1e-12

UNIQUE = "unique"
AFFINE = "affine_family"
INCONSISTENT = "inconsistent"


class AmbiguousSystemError(RuntimeError):
    """Relative residual between the consistency and inconsistency thresholds."""

    def __init__(self, report: RSolveReport):
        super().__init__(f"relative residual {report.residual:.3e} is between "
                         f"{report.tol_consistent:g} and {report.tol_inconsistent:g}")
        self.report = report


# -- seeded draws -------------------------------------------------------------

class Lcg64:
    """64-bit linear congruential generator (Knuth's MMIX constants).

    ``state <- (6364136223846793005 * state + 1442695040888963407) mod 2^64``;
    a uniform double takes the top 53 bits.
    """

    MUL = 6364136223846793005
    INC = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = int(seed) & self.MASK
        self.next_u64()

    def next_u64(self) -> int:
        self.state = (self.MUL * self.state + self.INC) & self.MASK
        return self.state

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0**-53)

    def uniforms(self, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        return np.array([self.uniform(lo, hi) for _ in range(n)])

    def matpoly(self, N: int, degree: int) -> MatPoly:
        """Random ``N x N`` polynomial with entries uniform in [-1, 1]."""
        return MatPoly(self.uniforms((degree + 1) * N * N, -1.0, 1.0).reshape(degree + 1, N, N))


# -- the matrix R -------------------------------------------------------------

def sigma(f: FamilyInstance, M: int) -> np.ndarray:
    """``Lambda_M + Lambda_(M+1)``."""
    return eigenvalue_matrix(f, M) + eigenvalue_matrix(f, M + 1)


def closed_form_R(f: FamilyInstance, M: int, m2_factor: int = 2) -> np.ndarray:
    """Closed-form ``R`` for the Pearson families.

    hermite     ``-(2M+1) psi0^T``
    laguerre    ``-k phi1^T - (2M+1) psi0^T``
    gegenbauer  ``-(k / (2 nu + N) + 2M + 1) psi0^T``
    charlier    ``k (phi1^T - psi1^T) + (2M+1) psi0^T``

    with ``k = m2_factor * M^2``.  The ``phi_2`` part of
    ``Lambda_M + Lambda_(M+1)`` is ``2 M^2 phi_2^T``, so only ``m2_factor=2``
    satisfies the defining identity for every ``M`` when ``phi_2 != 0``.
    """
    if not f.has_pearson:
        raise FamilyError(f"no closed-form R for {f.kind}")
    if M < 0:
        raise ValueError("M must be nonnegative")
    k = m2_factor * M * M
    phi1, psi1, psi0 = f.phi[1], f.psi[0], f.psi[1]
    if f.kind == "hermite":
        return -(2 * M + 1) * psi0.T
    if f.kind == "laguerre":
        return -k * phi1.T - (2 * M + 1) * psi0.T
    if f.kind == "gegenbauer":
        return -(k / (2 * f.nu + f.N) + 2 * M + 1) * psi0.T
    return k * (phi1.T - psi1.T) + (2 * M + 1) * psi0.T


def _pencil(R, S, N) -> MatPoly:
    return MatPoly.constant(R) - x_times(N) @ np.asarray(S, dtype=float)


def eq9_residual(f: FamilyInstance, R, S) -> float:
    """Normalized max coefficient of ``(R - x S) Q - Q (R - x S)^T``."""
    R, S = np.asarray(R, dtype=float), np.asarray(S, dtype=float)
    B = _pencil(R, S, f.N)
    E = B @ f.Q - f.Q @ B.T
    scale = f.Q.max_coeff_norm() * (max_abs(R) + max_abs(S))
    return E.max_coeff_norm() / scale if scale > 0 else E.max_coeff_norm()


@dataclass
class RSolveReport:
    status: str
    particular: np.ndarray | None
    nullspace: list
    residual: float
    rows_assembled: int
    rows_used: int
    cols: int
    rank: int
    tol_consistent: float = TOL_CONSISTENT
    tol_inconsistent: float = TOL_INCONSISTENT
    meta: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.status != INCONSISTENT

    def distance_to(self, R) -> float:
        """Distance of ``R`` from the affine solution set, relative to ``||R||``."""
        if self.particular is None:
            return math.inf
        r = np.asarray(R, dtype=float).reshape(-1)
        d = r - self.particular.reshape(-1)
        if self.nullspace:
            V = np.array([n.reshape(-1) for n in self.nullspace])
            d = d - V.T @ (V @ d)
        nr = np.linalg.norm(r)
        return float(np.linalg.norm(d) / nr) if nr > 0 else float(np.linalg.norm(d))

    def contains(self, R, tol: float = 1e-8) -> bool:
        return self.distance_to(R) < tol

    def nullspace_distance(self, X) -> float:
        """Distance of ``X`` from the span of the null space, relative to ``||X||``."""
        x = np.asarray(X, dtype=float).reshape(-1)
        if self.nullspace:
            V = np.array([n.reshape(-1) for n in self.nullspace])
            x_perp = x - V.T @ (V @ x)
        else:
            x_perp = x
        return float(np.linalg.norm(x_perp) / np.linalg.norm(x))

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "particular": None if self.particular is None else self.particular.tolist(),
            "nullspace": [n.tolist() for n in self.nullspace],
            "residual": self.residual,
            "rows_assembled": self.rows_assembled,
            "rows_used": self.rows_used,
            "cols": self.cols,
            "rank": self.rank,
            "tol_consistent": self.tol_consistent,
            "tol_inconsistent": self.tol_inconsistent,
            **self.meta,
        }


def assemble_R_system(f: FamilyInstance, S) -> tuple[np.ndarray, np.ndarray, int]:
    """Linear system for ``vec(R)`` (row-major) from every power of ``x``.

    Row ``(p, a, b)`` is the ``x^p`` coefficient, entry ``(a, b)``, of
    ``R Q - Q R^T = x (S Q - Q S^T)``.  Both sides are antisymmetric, so only
    ``a < b`` rows are kept, and rows below ``ZERO_ROW`` times the largest
    entry are dropped.  Returns
    ``(A, b, rows_assembled)``.
    """
    N = f.N
    S = np.asarray(S, dtype=float)
    Qc = f.Q.coeffs
    n_pow = Qc.shape[0] + 1
    rows, rhs = [], []
    assembled = 0
    for p in range(n_pow):
        Qp = Qc[p] if p < Qc.shape[0] else np.zeros((N, N))
        Qm = Qc[p - 1] if 1 <= p <= Qc.shape[0] else np.zeros((N, N))
        target = S @ Qm - Qm @ S.T
        for a in range(N):
            for b in range(N):
                assembled += 1
                if a >= b:
                    continue
                row = np.zeros(N * N)
                for c in range(N):
                    row[a * N + c] += Qp[c, b]
                    row[b * N + c] -= Qp[a, c]
                rows.append(row)
                rhs.append(target[a, b])
    A, b = np.array(rows).reshape(-1, N * N), np.array(rhs)
    # rows at rounding level would become noise equations after scaling
    size = np.maximum(np.abs(A).max(axis=1, initial=0.0), np.abs(b))
    keep = size > ZERO_ROW * size.max(initial=0.0)
    return A[keep], b[keep], assembled


def solve_R(f: FamilyInstance, S, rel_tol: float = 1e-8, tol_consistent: float = TOL_CONSISTENT,
            tol_inconsistent: float = TOL_INCONSISTENT) -> RSolveReport:
    """Solve ``(R - x S) W = W (R - x S)^T`` for ``R`` by least squares.

    Rows of ``[A | b]`` are scaled to unit max-norm before the SVD.  Raises
    :class:`AmbiguousSystemError` when the relative residual
    ``||A r - b|| / ||b||`` lands between the two thresholds.
    """
    N = f.N
    A, b, assembled = assemble_R_system(f, S)
    k = N * N
    if A.shape[0] == 0:
        basis = [np.eye(k)[i].reshape(N, N) for i in range(k)]
        return RSolveReport(AFFINE, np.zeros((N, N)), basis, 0.0, assembled, 0, k, 0,
                            tol_consistent, tol_inconsistent)
    scale = np.maximum(np.abs(A).max(axis=1), np.abs(b))
    A, b = A / scale[:, None], b / scale
    sol = solve_least_squares(A, b, rel_tol)
    nb = np.linalg.norm(b)
    resid = sol.residual_norm / nb if nb > 0 else sol.residual_norm
    nullspace = [v.reshape(N, N) for v in sol.nullspace]
    if resid < tol_consistent:
        status = UNIQUE if sol.rank == k else AFFINE
    elif resid > tol_inconsistent:
        status = INCONSISTENT
    else:
        status = "ambiguous"
    report = RSolveReport(status, None if status == INCONSISTENT else sol.solution.reshape(N, N),
                          nullspace, float(resid), assembled, A.shape[0], k, sol.rank,
                          tol_consistent, tol_inconsistent)
    if status == "ambiguous":
        raise AmbiguousSystemError(report)
    return report


def free_sigma(f: FamilyInstance, M: int = 0) -> np.ndarray:
    """``Lambda_M + Lambda_(M+1) = (2M + 1) I + 2J`` for the free operator."""
    return sigma(f, M)


def free_R_two(f: FamilyInstance) -> np.ndarray:
    """Known solution ``[[0, -1/r], [-t2/(t1 r), 0]]`` for the free weight at
    ``N = 2``, where ``r = alpha_2 / alpha_1``."""
    if f.kind != "hermite_free" or f.N != 2:
        raise FamilyError("defined for the free Hermite-type weight with N = 2")
    al, t = f.params["alpha"], f.params["t"]
    r = al[1] / al[0]
    return np.array([[0.0, -1.0 / r], [-t[1] / (t[0] * r), 0.0]])


# -- the operator T -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TOperator:
    family: FamilyInstance
    M: int
    omega: float
    R: np.ndarray
    S: np.ndarray
    D: RightOp
    op: RightOp
    validation_residual: float

    def __call__(self, F: MatPoly) -> MatPoly:
        return apply(self.op, F)

    def direct(self, F: MatPoly) -> MatPoly:
        """``(xF).D + (x - 2 omega)(F.D) - x F S + F R`` without the assembled
        coefficients."""
        x = x_times(F.shape[0])
        FD = apply(self.D, F)
        return (apply(self.D, x @ F) + (x - 2 * self.omega) @ FD
                - x @ F @ self.S + F @ self.R)


def assemble_T(D: RightOp, omega: float, R, S) -> RightOp:
    """Coefficients of ``x D + D (x - 2 omega) - x S + R``."""
    N = D.N
    x = x_times(N)
    R = MatPoly.constant(R)
    S = np.asarray(S, dtype=float)
    lead = 2 * x - 2 * omega
    if D.flavor == DIFFERENTIAL:
        c2, c1, c0 = D.coefficient(2), D.coefficient(1), D.coefficient(0)
        terms = {2: lead @ c2, 1: lead @ c1 + 2 * c2, 0: lead @ c0 + c1 - x @ S + R}
        return RightOp(DIFFERENTIAL, N, {k: v for k, v in terms.items() if not v.is_zero()})
    terms = {h: (lead + h) @ g for h, g in D.terms.items()}
    terms[0] = terms.get(0, MatPoly.zeros(N)) - x @ S + R
    return RightOp(DIFFERENCE, N, terms)


def build_T(f: FamilyInstance, M: int, omega: float, R=None, trials: int = 10,
            seed: int = 1) -> TOperator:
    """Assemble ``T`` for ``f`` and check it against direct evaluation on
    random polynomials.  ``R`` defaults to the closed form."""
    if M < 0:
        raise ValueError("M must be nonnegative")
    D = family_operator(f)
    S = sigma(f, M)
    if R is None:
        R = closed_form_R(f, M)
    R = np.asarray(R, dtype=float)
    op = assemble_T(D, omega, R, S)
    T = TOperator(f, M, float(omega), R, S, D, op, 0.0)
    rng = Lcg64(seed)
    worst = 0.0
    for _ in range(trials):
        F = rng.matpoly(f.N, 4)
        a, b = T(F), T.direct(F)
        worst = max(worst, (a - b).max_coeff_norm() / max(b.max_coeff_norm(), 1e-300))
    return TOperator(f, M, float(omega), R, S, D, op, worst)


# -- commutation checks -----------------------------------------------------------

def level_coupling(seq: MVOPSeq, T: TOperator, n: int) -> float:
    """Coupling of levels ``n`` and ``n + 1`` under ``T``.

    The larger of ``||<P_n.T, P_(n+1)>||_F`` and ``||<P_(n+1).T, P_n>||_F``
    divided by ``s ||P_n|| ||P_(n+1)||``, where ``||P|| = sqrt(tr H)`` and
    ``s = max(||P_n.T|| / ||P_n||, ||P_(n+1).T|| / ||P_(n+1)||)`` is the
    operator scale on the two levels.  The value lies in [0, 1].
    """
    f, P, k = seq.family, seq.P, seq.n_nodes
    a, b = P[n], P[n + 1]
    Ta, Tb = T(a), T(b)

    def nrm(X):
        return math.sqrt(abs(np.trace(inner(f, X, X, n_nodes=k))))

    na, nb = nrm(a), nrm(b)
    s = max(nrm(Ta) / na, nrm(Tb) / nb)
    num = max(np.linalg.norm(inner(f, Ta, b, n_nodes=k)), np.linalg.norm(inner(f, Tb, a, n_nodes=k)))
    return float(num / (s * na * nb)) if s > 0 else 0.0


def check_time_commutation(seq: MVOPSeq, T: TOperator, reference_level: int | None = None):
    """``(coupling_at_M, reference_coupling)``; the first vanishes when ``T``
    preserves the span of ``P_0..P_M``, the second is measured at another
    level (default ``M + 1``) where no cancellation is expected."""
    M = T.M
    ref = M + 1 if reference_level is None else reference_level
    if ref == M:
        raise ValueError("the reference level must differ from M")
    if seq.n_max < max(M, ref) + 2:
        raise ValueError(f"need MVOP up to degree {max(M, ref) + 2}, have {seq.n_max}")
    return level_coupling(seq, T, M), level_coupling(seq, T, ref)


def _symmetry_defect(f, T, F, G, band, n_nodes=None) -> float:
    TF, TG = T(F), T(G)
    diff = inner(f, TF, G, band, n_nodes) - inner(f, F, TG, band, n_nodes)

    def nrm(X):
        return math.sqrt(abs(np.trace(inner(f, X, X, band, n_nodes))))

    scale = nrm(TF) * nrm(G) + nrm(F) * nrm(TG)
    return float(np.linalg.norm(diff) / scale) if scale > 0 else float(np.linalg.norm(diff))


def check_band_symmetry(f: FamilyInstance, T: TOperator, omega: float | None = None,
                        trials: int = 5, seed: int = 3, degree: int = 4) -> float:
    """Worst normalized ``<F.T, G> - <F, G.T>`` over random pairs, with the
    inner product restricted to ``x < omega`` (default ``T.omega``)."""
    omega = T.omega if omega is None else omega
    rng = Lcg64(seed)
    worst = 0.0
    for _ in range(trials):
        F, G = rng.matpoly(f.N, degree), rng.matpoly(f.N, degree)
        worst = max(worst, _symmetry_defect(f, T, F, G, omega))
    return worst


def check_full_symmetry(f: FamilyInstance, T: TOperator, trials: int = 5, seed: int = 3,
                        degree: int = 4) -> float:
    """Same as :func:`check_band_symmetry` on the whole support."""
    rng = Lcg64(seed)
    worst = 0.0
    for _ in range(trials):
        F, G = rng.matpoly(f.N, degree), rng.matpoly(f.N, degree)
        worst = max(worst, _symmetry_defect(f, T, F, G, None))
    return worst


def band_edge(kind: str, omega: float) -> float:
    """Map a reference value of ``omega`` into the support of ``kind``.

    Charlier edges are half-integers ``K + 1/2``: the forward coefficient of
    ``T`` vanishes at ``x = omega - 1/2``, which must be the last kept node.
    """
    if kind in ("hermite", "hermite_free"):
        return float(omega)
    if kind == "laguerre":
        return 2.0 + 2.0 * omega
    if kind == "gegenbauer":
        return omega / 2.0
    if kind == "charlier":
        return math.floor(4.0 * (omega + 1.0)) + 0.5
    raise FamilyError(f"unknown family {kind!r}")


# -- the free Hermite-type weight ---------------------------------------------------

def free_draw(N: int, rng: Lcg64 | None) -> tuple[np.ndarray, np.ndarray]:
    """Default ``(alpha, t) = (1, j)`` or a random draw in [1/4, 4]."""
    if rng is None:
        return np.ones(N), np.arange(1.0, N + 1)
    return rng.uniforms(N, 0.25, 4.0), rng.uniforms(N, 0.25, 4.0)


def counterexample_sweep(sizes, trials: int = 5, seed: int = 7, M: int = 0,
                         tol_consistent: float = TOL_CONSISTENT,
                         tol_inconsistent: float = TOL_INCONSISTENT) -> tuple[list, dict]:
    """Solve for ``R`` on the free weight over sizes and parameter draws.

    Every size gets the default draw followed by ``trials`` seeded draws.
    Returns the reports (each with ``N`` and ``draw`` in ``meta``) and a
    summary of the expected pattern: an affine family at ``N = 2`` and no
    solution for ``N > 2``.
    """
    sizes = list(sizes)
    if any(n < 1 or n > 8 for n in sizes):
        raise ValueError("sizes must lie in 1..8")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = Lcg64(seed)
    reports = []
    for N in sizes:
        for draw in range(trials + 1):
            alpha, t = free_draw(N, None if draw == 0 else rng)
            f = build_family("hermite_free", N, alpha=alpha, t=t)
            try:
                rep = solve_R(f, free_sigma(f, M), tol_consistent=tol_consistent,
                              tol_inconsistent=tol_inconsistent)
            except AmbiguousSystemError as exc:
                rep = exc.report
            rep.meta.update(N=N, draw=draw, alpha=alpha.tolist(), t=t.tolist())
            reports.append(rep)
    two = [r for r in reports if r.meta["N"] == 2]
    big = [r for r in reports if r.meta["N"] > 2]
    summary = {
        "n2_affine": all(r.status == AFFINE for r in two) if two else None,
        "large_inconsistent": all(r.status == INCONSISTENT for r in big) if big else None,
        "ambiguous": sum(r.status == "ambiguous" for r in reports),
        "min_large_residual": min((r.residual for r in big), default=None),
    }
    return reports, summary
