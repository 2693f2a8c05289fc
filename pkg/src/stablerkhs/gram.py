"""Gram matrices ``M = V V^T`` of the sign matrices.

Because rows of ``V`` are read off binary indices, two rows agree wherever the
indices share a bit, so ``M[i, j] = m - 2 * popcount(i ^ j)``.  Entries are
O(1) and ``M`` is never stored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from numbers import Rational
from typing import NamedTuple

import numpy as np

from . import sign_matrix as sm
from .errors import BudgetError
from .sign_matrix import SignMatrixSpec

MSTAR_MAX_P = 3


@dataclass(frozen=True)
class GramSpec:
    base: SignMatrixSpec

    @classmethod
    def from_p(cls, p: int) -> "GramSpec":
        return cls(SignMatrixSpec(p))

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def m(self) -> int:
        return self.base.m

    @property
    def n(self) -> int:
        return self.base.n


def entry(g: GramSpec, i: int, j: int) -> int:
    n = g.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"index ({i}, {j}) out of range [0, 2^{g.m})")
    return g.m - 2 * (i ^ j).bit_count()


def dense(g: GramSpec, cap: int = 4096) -> np.ndarray:
    """Materialize ``M`` (int64) via the popcount formula."""
    if g.n > cap:
        raise BudgetError(f"dense Gram matrix of size 2^{g.m} exceeds cap {cap}", cap=cap)
    idx = np.arange(g.n, dtype=np.int64)
    return g.m - 2 * np.bitwise_count(idx[:, None] ^ idx[None, :]).astype(np.int64)


def l1_closed(g: GramSpec) -> int:
    """Entrywise l1 norm: every column has l1 norm equal to ``|V|_{inf,1}``."""
    return g.n * sm.opnorm_inf1_closed(g.base)


def opnorm_inf1_value(g: GramSpec) -> int:
    """(inf, 1) norm of ``M``, equal to ``n**2``."""
    return g.n * g.n


def apply(g: GramSpec, u, cap: int = sm.MATERIALIZE_CAP) -> np.ndarray:
    """``M u`` computed as ``V (V^T u)`` in two streaming passes."""
    if g.n > cap:
        raise BudgetError(f"Gram apply needs 2^{g.m} <= {cap}", cap=cap)
    u = np.asarray(u)
    if u.shape != (g.n,):
        raise ValueError(f"u must have length 2^{g.m}, got shape {u.shape}")
    if not np.issubdtype(u.dtype, np.integer):
        u = u.astype(np.float64)
    w = np.zeros(g.m, dtype=u.dtype)
    start = 0
    for block in sm.iter_row_blocks(g.base):
        w = w + block.T @ u[start:start + len(block)]
        start += len(block)
    out = []
    for block in sm.iter_row_blocks(g.base):
        out.append(block @ w)
    return np.concatenate(out)


def sphere_objective(g: GramSpec, a) -> float:
    """``n * sum_{b in {+-1}^m} |a . b|``, i.e. ``n |V a|_1``."""
    return g.n * sm.apply(g.base, np.asarray(a, dtype=np.float64)).l1


class MStarResult(NamedTuple):
    value: int
    numeric_max: float | None
    maximizer: np.ndarray | None
    on_boundary: bool | None


def _ascent(V: np.ndarray, a: np.ndarray, iters: int, tol: float) -> tuple[float, np.ndarray]:
    def f(x):
        return float(np.abs(V @ x).sum())

    a = a / np.linalg.norm(a)
    fa = f(a)
    step = 1.0
    for _ in range(iters):
        grad = V.T @ np.sign(V @ a)
        cand = a + step * grad / max(np.linalg.norm(grad), 1e-300)
        cand /= np.linalg.norm(cand)
        fc = f(cand)
        if fc > fa:
            if fc - fa < tol * max(1.0, fa):
                a, fa = cand, fc
                break
            a, fa = cand, fc
        else:
            step *= 0.5
            if step < tol:
                break
    return fa, a


def mstar_value(
    g: GramSpec,
    numeric: bool = True,
    restarts: int = 32,
    iters: int = 500,
    tol: float = 1e-10,
    seed: int = 0,
) -> MStarResult:
    """``n * max_{|a|_2 <= 1} |V a|_1``, equal to ``n**2``.

    For ``p <= 3`` the maximum is also searched numerically by projected
    gradient ascent on the unit sphere (step halving, several random starts).
    The ascent works on the sphere; ``on_boundary`` records that no interior
    point beats the best sphere point (scaling by ``1/|a|`` strictly increases
    the objective).
    """
    value = g.n * g.n
    if not numeric or g.p > MSTAR_MAX_P:
        return MStarResult(value, None, None, None)
    V = sm.dense(g.base).astype(np.float64)
    rng = np.random.default_rng(seed)
    best, best_a = -1.0, None
    for _ in range(restarts):
        fa, a = _ascent(V, rng.standard_normal(g.m), iters, tol)
        if fa > best:
            best, best_a = fa, a
    numeric_max = g.n * best
    # any interior point a/2 is strictly worse, by positive homogeneity
    interior = g.n * float(np.abs(V @ (0.5 * best_a)).sum())
    return MStarResult(value, numeric_max, best_a, interior < numeric_max)


class ParsevalResult(NamedTuple):
    passed: bool
    lhs: Fraction | float
    rhs: Fraction | float


def parseval_identity_check(
    g: GramSpec, a, rtol: float = 1e-12, max_p: int = sm.STREAM_CAP_P
) -> ParsevalResult:
    """Check ``sum_b (a . b)**2 == 2**m |a|_2**2`` over all sign vectors ``b``.

    Rational ``a`` is checked exactly; otherwise a streaming float sum is
    compared at relative tolerance ``rtol``.
    """
    if g.p > max_p:
        raise BudgetError(f"identity check streams 2^{g.m} terms; p <= {max_p}", cap=max_p)
    a = list(a)
    if len(a) != g.m:
        raise ValueError(f"a must have length m={g.m}")
    if all(isinstance(x, Rational) for x in a):
        fa = [Fraction(x) for x in a]
        lhs = Fraction(0)
        for b in product((1, -1), repeat=g.m):
            s = sum(x * y for x, y in zip(fa, b))
            lhs += s * s
        rhs = g.n * sum(x * x for x in fa)
        return ParsevalResult(lhs == rhs, lhs, rhs)
    av = np.asarray(a, dtype=np.float64)
    lhs = 0.0
    for block in sm.iter_row_blocks(g.base):
        lhs += float(np.sum((block @ av) ** 2))
    rhs = g.n * float(av @ av)
    ok = abs(lhs - rhs) <= rtol * max(abs(rhs), np.finfo(float).tiny)
    return ParsevalResult(ok, lhs, rhs)


class RatioResult(NamedTuple):
    exact: Fraction
    asymptote: float
    deviation: float


def ratio(g: GramSpec) -> RatioResult:
    """Exact ``|M|_{inf,1} / |M|_1`` and its relative gap to ``sqrt(pi / 4p)``."""
    r = Fraction(opnorm_inf1_value(g), l1_closed(g))
    asym = math.sqrt(math.pi / (4 * g.p))
    # numerator and denominator are huge; Fraction -> float rounds correctly
    return RatioResult(r, asym, abs(float(r) / asym - 1.0))
