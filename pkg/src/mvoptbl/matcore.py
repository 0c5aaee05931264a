"""Dense matrix and matrix-polynomial arithmetic.

Constant matrices are plain ``numpy`` float arrays.  :class:`MatPoly` stores a
polynomial in one real variable with matrix coefficients as an array of shape
``(degree + 1, rows, cols)`` where index ``p`` holds the coefficient of
``x**p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import comb

# Degree of the zero polynomial.
NEG_INF = -math.inf


class DimensionError(ValueError):
    pass


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def mat_add(a, b) -> np.ndarray:
    a, b = _as_matrix(a), _as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"cannot add {a.shape} and {b.shape}")
    return a + b


def mat_sub(a, b) -> np.ndarray:
    a, b = _as_matrix(a), _as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"cannot subtract {a.shape} and {b.shape}")
    return a - b


def mat_mul(a, b) -> np.ndarray:
    a, b = _as_matrix(a), _as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def mat_scale(s: float, a) -> np.ndarray:
    return float(s) * _as_matrix(a)


def adjoint(a) -> np.ndarray:
    """Adjoint of a real matrix, i.e. its transpose."""
    return _as_matrix(a).T.copy()


def commutator(a, b) -> np.ndarray:
    return mat_mul(a, b) - mat_mul(b, a)


def is_symmetric(a, atol: float = 1e-12) -> bool:
    a = _as_matrix(a)
    return a.shape[0] == a.shape[1] and bool(np.all(np.abs(a - a.T) <= atol))


def is_antisymmetric(a, atol: float = 1e-12) -> bool:
    a = _as_matrix(a)
    return a.shape[0] == a.shape[1] and bool(np.all(np.abs(a + a.T) <= atol))


def max_abs(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.abs(a).max()) if a.size else 0.0


class MatPoly:
    """Polynomial ``sum_p coeffs[p] * x**p`` with real matrix coefficients.

    Instances are immutable.  Trailing zero coefficients are trimmed on
    construction so that :attr:`degree` is canonical; the zero polynomial has
    degree :data:`NEG_INF`.

    Matrix products use ``@`` and work with constant ``numpy`` matrices on
    either side.  ``*`` is reserved for scalars.
    """

    __slots__ = ("_c",)
    __array_ufunc__ = None  # make ndarray @ MatPoly dispatch to __rmatmul__

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.ndim == 2:
            c = c[None]
        if c.ndim != 3:
            raise DimensionError(f"coefficients must have shape (d+1, n, m), got {c.shape}")
        nz = np.flatnonzero(np.any(c.reshape(c.shape[0], -1) != 0.0, axis=1))
        keep = int(nz[-1]) + 1 if nz.size else 0
        c = c[:keep] if keep else np.zeros((0,) + c.shape[1:])
        c.setflags(write=False)
        self._c = c

    # -- constructors -------------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> MatPoly:
        return cls(np.zeros((1, rows, rows if cols is None else cols)))

    @classmethod
    def constant(cls, m) -> MatPoly:
        return cls(_as_matrix(m)[None])

    @classmethod
    def identity(cls, n: int) -> MatPoly:
        return cls(np.eye(n)[None])

    @classmethod
    def monomial(cls, k: int, m) -> MatPoly:
        """``x**k * m`` for a constant matrix ``m``."""
        m = _as_matrix(m)
        c = np.zeros((k + 1,) + m.shape)
        c[k] = m
        return cls(c)

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence]) -> MatPoly:
        """Build from a nested list of scalar coefficient sequences.

        ``entries[i][j]`` is the coefficient list (lowest power first) of the
        ``(i, j)`` entry; ``numpy.polynomial.Polynomial`` objects are accepted.
        """
        rows, cols = len(entries), len(entries[0])
        coef = [[np.atleast_1d(np.asarray(getattr(e, "coef", e), dtype=float)) for e in row]
                for row in entries]
        deg = max(len(e) for row in coef for e in row)
        c = np.zeros((deg, rows, cols))
        for i in range(rows):
            for j in range(cols):
                c[: len(coef[i][j]), i, j] = coef[i][j]
        return cls(c)

    # -- basic properties ---------------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        if self._c.shape[0] == 0:
            return np.zeros((1,) + self._c.shape[1:])
        return self._c

    @property
    def shape(self) -> tuple[int, int]:
        return self._c.shape[1], self._c.shape[2]

    @property
    def size(self) -> int:
        return self._c.shape[1]

    @property
    def degree(self) -> float | int:
        return self._c.shape[0] - 1 if self._c.shape[0] else NEG_INF

    def is_zero(self) -> bool:
        return self._c.shape[0] == 0

    def coeff(self, p: int) -> np.ndarray:
        if 0 <= p < self._c.shape[0]:
            return self._c[p].copy()
        return np.zeros(self.shape)

    def leading(self) -> np.ndarray:
        return self.coeff(self._c.shape[0] - 1)

    def max_coeff_norm(self) -> float:
        """Largest absolute entry over all coefficients (0 for the zero poly)."""
        return max_abs(self._c)

    def __repr__(self):
        return f"MatPoly(shape={self.shape}, degree={self.degree})"

    # -- evaluation ---------------------------------------------------------
    def __call__(self, x):
        """Evaluate at a scalar (returns a matrix) or an array of points
        (returns an array of matrices)."""
        c = self.coeffs
        xs = np.asarray(x, dtype=float)
        out = np.broadcast_to(c[-1], xs.shape + self.shape).copy()
        xb = xs[..., None, None]
        for p in range(c.shape[0] - 2, -1, -1):
            out = out * xb + c[p]
        return out

    # -- arithmetic ---------------------------------------------------------
    def _check_same(self, other: MatPoly):
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    @staticmethod
    def _lift(other, shape):
        if isinstance(other, MatPoly):
            return other
        m = np.asarray(other, dtype=float)
        if m.ndim == 0:
            return MatPoly(float(m) * np.eye(shape[0])[None])
        return MatPoly.constant(m)

    def __add__(self, other):
        other = self._lift(other, self.shape)
        self._check_same(other)
        a, b = self.coeffs, other.coeffs
        n = max(a.shape[0], b.shape[0])
        c = np.zeros((n,) + self.shape)
        c[: a.shape[0]] += a
        c[: b.shape[0]] += b
        return MatPoly(c)

    __radd__ = __add__

    def __neg__(self):
        return MatPoly(-self.coeffs)

    def __sub__(self, other):
        return self + (-self._lift(other, self.shape))

    def __rsub__(self, other):
        return self._lift(other, self.shape) - self

    def __mul__(self, s):
        if isinstance(s, MatPoly) or np.ndim(s) != 0:
            raise TypeError("use @ for matrix products; * is for scalars")
        return MatPoly(float(s) * self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1.0 / float(s))

    def __matmul__(self, other):
        if not isinstance(other, MatPoly):
            other = MatPoly.constant(other)
        if self.shape[1] != other.shape[0]:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        if self.is_zero() or other.is_zero():
            return MatPoly.zeros(self.shape[0], other.shape[1])
        a, b = self._c, other._c
        c = np.zeros((a.shape[0] + b.shape[0] - 1, self.shape[0], other.shape[1]))
        for p in range(a.shape[0]):
            c[p : p + b.shape[0]] += np.matmul(a[p], b)
        return MatPoly(c)

    def __rmatmul__(self, other):
        return MatPoly.constant(other) @ self

    def mul_x(self, k: int = 1) -> MatPoly:
        """Multiply by ``x**k``."""
        if self.is_zero():
            return self
        return MatPoly(np.concatenate([np.zeros((k,) + self.shape), self._c]))

    def adjoint(self) -> MatPoly:
        return MatPoly(np.transpose(self.coeffs, (0, 2, 1)))

    @property
    def T(self) -> MatPoly:
        return self.adjoint()

    def derivative(self) -> MatPoly:
        c = self._c
        if c.shape[0] <= 1:
            return MatPoly.zeros(*self.shape)
        p = np.arange(1, c.shape[0], dtype=float)[:, None, None]
        return MatPoly(p * c[1:])

    def shift(self, h: float) -> MatPoly:
        """Return ``r`` with ``r(x) = self(x + h)`` (binomial re-expansion)."""
        c = self._c
        if c.shape[0] <= 1 or h == 0:
            return self
        n = c.shape[0]
        p = np.arange(n)
        # B[q, p] = binom(p, q) h**(p - q)
        B = comb(p[None, :], p[:, None]) * np.where(
            p[None, :] >= p[:, None], float(h) ** np.maximum(p[None, :] - p[:, None], 0), 0.0
        )
        return MatPoly(np.einsum("qp,pij->qij", B, c))

    def allclose(self, other: MatPoly, rtol: float = 1e-12, atol: float = 0.0) -> bool:
        diff = (self - other).max_coeff_norm()
        scale = max(self.max_coeff_norm(), other.max_coeff_norm())
        return diff <= atol + rtol * scale

    def to_list(self) -> list:
        return self.coeffs.tolist()


def diag_poly(entries: Iterable) -> MatPoly:
    """Diagonal MatPoly from scalar polynomials (coefficient lists or
    ``numpy.polynomial.Polynomial``)."""
    entries = list(entries)
    n = len(entries)
    grid = [[entries[i] if i == j else [0.0] for j in range(n)] for i in range(n)]
    return MatPoly.from_entries(grid)


def x_times(n: int) -> MatPoly:
    """The polynomial ``x * I_n``."""
    return MatPoly.monomial(1, np.eye(n))


@dataclass(frozen=True)
class LstsqResult:
    solution: np.ndarray
    nullspace: np.ndarray  # shape (k - rank, k), rows span the null space
    residual_norm: float
    rank: int
    singular_values: np.ndarray


def solve_least_squares(A, b, rel_tol: float = 1e-8) -> LstsqResult:
    """Minimum-norm least-squares solution with SVD rank analysis.

    Singular values at or below ``rel_tol * sigma_max`` are treated as zero.
    An all-zero ``A`` has rank 0; the solution is then zero and the residual
    is ``||b||``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    m, k = A.shape
    if m < 1 or k < 1:
        raise DimensionError(f"empty system {A.shape}")
    if b.shape[0] != m:
        raise DimensionError(f"right-hand side has {b.shape[0]} rows, expected {m}")
    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rel_tol * smax)) if smax > 0 else 0
    coef = (U[:, :rank].T @ b) / s[:rank]
    x = Vt[:rank].T @ coef
    resid = float(np.linalg.norm(A @ x - b))
    return LstsqResult(x, Vt[rank:].copy(), resid, rank, s)
