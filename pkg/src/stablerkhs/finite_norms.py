"""Exact norms of explicit finite matrices.

Two norms are computed for a matrix ``M``:

* the entrywise l1 norm ``sum |M_ij|``;
* the (inf, 1) operator norm ``max_{|u|_inf = 1} |M u|_1``.

The operator norm is maximized over sign vectors only (a convex function on
the cube peaks at a vertex), by walking the sign vectors in Gray-code order so
that each step flips one column and costs ``O(rows)``.  Rational input is
scaled to integers first so the maximum is exact.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetError

MAX_ENUM_COLS = 24

_INT64_SAFE = 2**62


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    VERTEX_ENUMERATION = "vertex_enumeration"
    ASYMPTOTIC = "asymptotic"


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """An explicit finite matrix.

    ``values`` is either an object array of :class:`fractions.Fraction`
    (``exact=True``) or a float64 array.  Build instances with
    :meth:`from_rows` / :func:`as_matrix` rather than directly.
    """

    values: np.ndarray
    exact: bool

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], exact: bool | None = None) -> "DenseMatrix":
        arr = np.asarray(rows, dtype=object if exact else None)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
        if exact is None:
            exact = arr.dtype == object or np.issubdtype(arr.dtype, np.integer) or arr.dtype == bool
        if exact:
            vals = np.empty(arr.shape, dtype=object)
            flat = [_to_fraction(x) for x in arr.ravel()]
            vals.ravel()[:] = flat
            return cls(vals, True)
        return cls(np.asarray(arr, dtype=np.float64), False)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def entries(self) -> tuple:
        """Row-major entries."""
        return tuple(self.values.ravel())

    def to_float(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def scale(self, alpha) -> "DenseMatrix":
        if self.exact:
            a = _to_fraction(alpha)
            return DenseMatrix(self.values * a, True)
        return DenseMatrix(self.values * float(alpha), False)

    def pad_leading_zero(self) -> "DenseMatrix":
        """Return ``diag(0, M)``: one zero row and column prepended."""
        r, c = self.shape
        if self.exact:
            out = np.full((r + 1, c + 1), Fraction(0), dtype=object)
        else:
            out = np.zeros((r + 1, c + 1))
        out[1:, 1:] = self.values
        return DenseMatrix(out, self.exact)

    def is_symmetric(self, atol: float = 1e-14) -> bool:
        if self.rows != self.cols:
            return False
        if self.exact:
            return bool(np.all(self.values == self.values.T))
        v = self.values
        scale = max(1.0, float(np.max(np.abs(v)))) if v.size else 1.0
        return bool(np.all(np.abs(v - v.T) <= atol * scale))

    def __repr__(self) -> str:
        kind = "exact" if self.exact else "float"
        return f"DenseMatrix({self.rows}x{self.cols}, {kind})"


def as_matrix(M) -> DenseMatrix:
    if isinstance(M, DenseMatrix):
        return M
    return DenseMatrix.from_rows(M)


@dataclass(frozen=True)
class NormReport:
    l1_entrywise: Fraction | float
    opnorm_inf1: Fraction | float
    witness_u: tuple[int, ...]
    method: Method

    @property
    def ratio(self):
        return self.opnorm_inf1 / self.l1_entrywise


def l1_entrywise(M) -> Fraction | float:
    """Sum of absolute values of all entries (exact for exact matrices)."""
    M = as_matrix(M)
    if M.exact:
        return sum((abs(x) for x in M.values.ravel()), Fraction(0))
    return float(np.abs(M.values).sum())


def _integer_scaled(M: DenseMatrix) -> tuple[np.ndarray, int]:
    """Return ``(A, d)`` with ``A = d * M`` integral; int64 when it cannot overflow."""
    den = reduce(lcm, (x.denominator for x in M.values.ravel()), 1)
    ints = [x.numerator * (den // x.denominator) for x in M.values.ravel()]
    bound = max((abs(v) for v in ints), default=0) * max(M.rows, 1) * max(M.cols, 1)
    if bound < _INT64_SAFE:
        A = np.array(ints, dtype=np.int64).reshape(M.shape)
    else:
        A = np.empty(M.shape, dtype=object)
        A.ravel()[:] = ints
    return A, den


def gray_sign_vector(t: int, k: int) -> np.ndarray:
    """Sign vector visited at step ``t`` of the walk; the first entry is pinned to +1."""
    g = t ^ (t >> 1)
    u = np.ones(k, dtype=np.int64)
    for j in range(1, k):
        if (g >> (j - 1)) & 1:
            u[j] = -1
    return u


def _check_cols(k: int, cap: int) -> None:
    if k > cap:
        raise BudgetError(
            f"vertex enumeration over {k} columns exceeds the cap of {cap} columns (2^{cap} sign vectors)",
            cap=cap,
        )


def _gray_walk(A: np.ndarray) -> tuple[object, int]:
    # u and -u give the same |Au|_1, so u_0 stays +1 and only 2^(k-1) vertices are visited.
    k = A.shape[1]
    u = np.ones(k, dtype=np.int64)
    y = A.sum(axis=1)
    best = np.abs(y).sum()
    best_t = 0
    for t in range(1, 1 << max(k - 1, 0)):
        col = (t & -t).bit_length()
        u[col] = -u[col]
        if u[col] > 0:
            y = y + 2 * A[:, col]
        else:
            y = y - 2 * A[:, col]
        val = np.abs(y).sum()
        if val > best:
            best, best_t = val, t
    return best, best_t


def _naive_max(A: np.ndarray, chunk: int = 4096) -> tuple[object, int]:
    k = A.shape[1]
    total = 1 << max(k - 1, 0)
    best, best_t = None, 0
    for start in range(0, total, chunk):
        ts = np.arange(start, min(start + chunk, total), dtype=np.int64)
        g = ts ^ (ts >> 1)
        U = np.ones((len(ts), k), dtype=np.int64)
        for j in range(1, k):
            U[:, j] = 1 - 2 * ((g >> (j - 1)) & 1)
        if A.dtype == object:
            U = U.astype(object)
        vals = np.abs(A @ U.T).sum(axis=0)
        i = int(np.argmax(vals))
        if best is None or vals[i] > best:
            best, best_t = vals[i], start + i
    return best, best_t


def _enumerate(M, naive: bool, cap: int) -> NormReport:
    M = as_matrix(M)
    _check_cols(M.cols, cap)
    search = _naive_max if naive else _gray_walk
    if M.exact:
        A, den = _integer_scaled(M)
        best, t = search(A)
        value = Fraction(int(best), den)
    else:
        best, t = search(M.values)
        value = float(best)
    witness = tuple(int(x) for x in gray_sign_vector(t, M.cols))
    return NormReport(l1_entrywise(M), value, witness, Method.VERTEX_ENUMERATION)


def opnorm_inf1_bruteforce(M, cap: int = MAX_ENUM_COLS) -> NormReport:
    """(inf, 1) norm by Gray-code vertex enumeration.

    Ties resolve to the earliest vertex of the walk.  Since ``u`` and ``-u``
    give the same value, the first witness entry is always +1.

    Raises
    ------
    BudgetError
        If ``M`` has more than ``cap`` columns.
    """
    return _enumerate(M, naive=False, cap=cap)


def opnorm_inf1_naive(M, cap: int = MAX_ENUM_COLS) -> NormReport:
    """Same maximization, re-multiplying every vertex from scratch (cross-check path)."""
    return _enumerate(M, naive=True, cap=cap)


def norm_ratio(M, cap: int = MAX_ENUM_COLS) -> Fraction | float:
    """``|M|_{inf,1} / |M|_1``; lies in ``[0, 1]`` for every nonzero matrix."""
    M = as_matrix(M)
    l1 = l1_entrywise(M)
    if l1 == 0:
        raise ValueError("norm ratio undefined for the zero matrix")
    report = opnorm_inf1_bruteforce(M, cap=cap)
    return report.opnorm_inf1 / l1


def l1_of_product(M, u) -> Fraction | float:
    """``|M u|_1`` for a single input vector (exact when both sides are)."""
    M = as_matrix(M)
    u = np.asarray(u, dtype=object if M.exact else np.float64)
    if M.exact:
        u = np.array([_to_fraction(x) for x in u], dtype=object)
        return sum((abs(x) for x in M.values @ u), Fraction(0))
    return float(np.abs(M.values @ u).sum())
