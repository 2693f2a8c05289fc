"""Kernels as lazy infinite matrices.

Indices are 1-based throughout, as in ``K[i, j]`` with ``i, j = 1, 2, ...``.
A :class:`KernelHandle` only knows how to produce entries; finite sections are
built on demand.  The two block-diagonal operators are described by a
:class:`BlockSchedule` that carries exact per-block norms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, NamedTuple

import numpy as np

from . import gram as gm
from . import sign_matrix as sm
from .errors import BudgetError, ContractError
from .finite_norms import DenseMatrix, as_matrix

SECTION_CAP = 4096


def block_size_for(p: int) -> int:
    """``n(p) = 2**(2p + 1)``."""
    return 1 << (2 * p + 1)


P_OF_H = {
    "h": lambda h: h,
    "h2": lambda h: h * h,
}


def _resolve_p_of_h(choice) -> tuple[str, Callable[[int], int]]:
    if callable(choice):
        return getattr(choice, "__name__", "custom"), choice
    key = {"h^2": "h2", "h**2": "h2"}.get(choice, choice)
    if key not in P_OF_H:
        raise ValueError(f"unknown p(h) choice {choice!r}; expected one of {sorted(P_OF_H)}")
    return key, P_OF_H[key]


@dataclass(frozen=True)
class BlockSchedule:
    """Layout and exact per-block data of a block-diagonal infinite matrix.

    Block ``h`` (``h >= 1``) occupies rows ``row_offset(h) + 1 ..`` and
    columns ``col_offset(h) + 1 ..``.  ``block_entry(h, r, c)`` takes 0-based
    local indices.
    """

    p_of_h: Callable[[int], int]
    block_row_size: Callable[[int], int]
    block_col_size: Callable[[int], int]
    block_scale: Callable[[int], Fraction]
    block_entry: Callable[[int, int, int], Fraction]
    block_l1: Callable[[int], Fraction]
    block_opnorm: Callable[[int], Fraction]
    block_witness: Callable[[int], np.ndarray]
    # (h, rows, cols) -> leading rows x cols corner of block h, exact
    block_dense: Callable[[int, int, int], np.ndarray]

    @property
    def square(self) -> bool:
        return self.block_row_size(1) == self.block_col_size(1)

    def row_boundary(self, t: int) -> int:
        """Number of rows covered by blocks ``1..t``."""
        return sum(self.block_row_size(h) for h in range(1, t + 1))

    def col_boundary(self, t: int) -> int:
        return sum(self.block_col_size(h) for h in range(1, t + 1))

    def _locate(self, i: int, size: Callable[[int], int]) -> tuple[int, int]:
        if i < 1:
            raise IndexError(f"indices are 1-based, got {i}")
        h, start = 1, 0
        while True:
            s = size(h)
            if i <= start + s:
                return h, i - start - 1
            start += s
            h += 1

    def locate_row(self, i: int) -> tuple[int, int]:
        """Global 1-based row -> (block, 0-based local row)."""
        return self._locate(i, self.block_row_size)

    def locate_col(self, j: int) -> tuple[int, int]:
        return self._locate(j, self.block_col_size)

    def global_row(self, h: int, local: int) -> int:
        return self.row_boundary(h - 1) + local + 1

    def global_col(self, h: int, local: int) -> int:
        return self.col_boundary(h - 1) + local + 1

    def blocks_within(self, rows: int, cols: int) -> int:
        """Largest ``t`` whose first ``t`` blocks fit inside a ``rows x cols`` corner."""
        t = 0
        while self.row_boundary(t + 1) <= rows and self.col_boundary(t + 1) <= cols:
            t += 1
        return t


@dataclass(frozen=True)
class KernelHandle:
    """An infinite matrix given by an entry rule plus structural metadata."""

    name: str
    entry: Callable[[int, int], Any]
    symmetric: bool
    psd_by_construction: bool
    block_schedule: BlockSchedule | None = None
    params: dict = field(default_factory=dict)
    # optional vectorized builder of the leading T x T section
    section_builder: Callable[[int], np.ndarray] | None = None
    exact: bool = True
    total_mass: float | Fraction | None = None
    tail_mass: Callable[[int], float] | None = None

    def __call__(self, i: int, j: int):
        return self.entry(i, j)


def _block_diagonal_builder(schedule: BlockSchedule) -> Callable[[int], np.ndarray]:
    def build(T: int) -> np.ndarray:
        out = np.full((T, T), Fraction(0), dtype=object)
        h, r0, c0 = 1, 0, 0
        while r0 < T and c0 < T:
            R, C = schedule.block_row_size(h), schedule.block_col_size(h)
            rr, cc = min(R, T - r0), min(C, T - c0)
            out[r0:r0 + rr, c0:c0 + cc] = schedule.block_dense(h, rr, cc)
            r0 += R
            c0 += C
            h += 1
        return out

    return build


def _scaled_object(ints: np.ndarray, scale: Fraction) -> np.ndarray:
    out = np.empty(ints.shape, dtype=object)
    out.ravel()[:] = [Fraction(int(v)) * scale for v in ints.ravel()]
    return out


def _gram_corner(g: gm.GramSpec, rows: int, cols: int) -> np.ndarray:
    r = np.arange(rows, dtype=np.int64)
    c = np.arange(cols, dtype=np.int64)
    return g.m - 2 * np.bitwise_count(r[:, None] ^ c[None, :]).astype(np.int64)


def counterexample_v(p_of_h="h") -> KernelHandle:
    """Block-diagonal operator built from scaled sign matrices.

    Block ``h`` is the ``n x m`` sign matrix for ``p = p(h)`` divided by
    ``h * m * n``, so its entrywise l1 mass is ``1/h`` while its (inf, 1) norm
    decays like ``h**-1.5``.  Blocks are rectangular, so the handle is not
    symmetric.
    """
    tag, p_fn = _resolve_p_of_h(p_of_h)

    def spec(h):
        return sm.SignMatrixSpec(p_fn(h))

    def scale(h):
        s = spec(h)
        return Fraction(1, h * s.m * s.n)

    def block_entry(h, r, c):
        s = spec(h)
        sign = -1 if (r >> (s.m - 1 - c)) & 1 else 1
        return sign * scale(h)

    schedule = BlockSchedule(
        p_of_h=p_fn,
        block_row_size=lambda h: spec(h).n,
        block_col_size=lambda h: spec(h).m,
        block_scale=scale,
        block_entry=block_entry,
        block_l1=lambda h: Fraction(1, h),
        block_opnorm=lambda h: sm.opnorm_inf1_closed(spec(h)) * scale(h),
        block_witness=lambda h: np.ones(spec(h).m, dtype=np.int64),
        block_dense=lambda h, rr, cc: _scaled_object(
            sm.sign_rows(spec(h).m, np.arange(rr))[:, :cc], scale(h)
        ),
    )

    def entry(i, j):
        h, r = schedule.locate_row(i)
        h2, c = schedule.locate_col(j)
        if h != h2:
            return Fraction(0)
        return block_entry(h, r, c)

    return KernelHandle(
        name="counterexample-v",
        entry=entry,
        symmetric=False,
        psd_by_construction=False,
        block_schedule=schedule,
        params={"p_of_h": tag},
        section_builder=_block_diagonal_builder(schedule),
    )


def counterexample_s(p_of_h="h") -> KernelHandle:
    """Symmetric PSD block-diagonal kernel with divergent entrywise mass.

    Block ``h`` is the Gram matrix of the ``p(h)`` sign matrix divided by
    ``h`` times its own l1 norm: mass ``1/h`` per block, (inf, 1) norm
    ``n / (h |V|_{inf,1})``.  Entries are exact rationals.
    """
    tag, p_fn = _resolve_p_of_h(p_of_h)

    def gspec(h):
        return gm.GramSpec.from_p(p_fn(h))

    def scale(h):
        return Fraction(1, h * gm.l1_closed(gspec(h)))

    def block_entry(h, r, c):
        return gm.entry(gspec(h), r, c) * scale(h)

    def witness(h):
        # first column of V: +1 on the top half of the block, -1 below
        n = gspec(h).n
        return np.where(np.arange(n) < n // 2, 1, -1).astype(np.int64)

    schedule = BlockSchedule(
        p_of_h=p_fn,
        block_row_size=lambda h: gspec(h).n,
        block_col_size=lambda h: gspec(h).n,
        block_scale=scale,
        block_entry=block_entry,
        block_l1=lambda h: Fraction(1, h),
        block_opnorm=lambda h: gm.opnorm_inf1_value(gspec(h)) * scale(h),
        block_witness=witness,
        block_dense=lambda h, rr, cc: _scaled_object(_gram_corner(gspec(h), rr, cc), scale(h)),
    )

    def entry(i, j):
        h, r = schedule.locate_row(i)
        h2, c = schedule.locate_col(j)
        if h != h2:
            return Fraction(0)
        return block_entry(h, r, c)

    return KernelHandle(
        name="counterexample-s",
        entry=entry,
        symmetric=True,
        psd_by_construction=True,
        block_schedule=schedule,
        params={"p_of_h": tag},
        section_builder=_block_diagonal_builder(schedule),
    )


def stable_spline_mass(alpha: float) -> float:
    """``sum_{i,j>=1} alpha**max(i,j) = sum_k alpha**k (2k - 1)``."""
    return 2 * alpha / (1 - alpha) ** 2 - alpha / (1 - alpha)


def stable_spline_tail(alpha: float, T: int) -> float:
    """Mass outside the leading ``T x T`` section."""
    return alpha ** (T + 1) * ((2 * T + 1) / (1 - alpha) + 2 * alpha / (1 - alpha) ** 2)


def stable_spline(alpha: float) -> KernelHandle:
    """``K[i, j] = alpha**max(i, j)`` for ``0 < alpha < 1``."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    alpha = float(alpha)

    def build(T):
        idx = np.arange(1, T + 1)
        return alpha ** np.maximum.outer(idx, idx).astype(np.float64)

    return KernelHandle(
        name="stable-spline",
        entry=lambda i, j: alpha ** max(i, j),
        symmetric=True,
        psd_by_construction=True,
        params={"alpha": alpha},
        section_builder=build,
        exact=False,
        total_mass=stable_spline_mass(alpha),
        tail_mass=lambda T: stable_spline_tail(alpha, T),
    )


def constant_kernel(c=1) -> KernelHandle:
    """``K[i, j] = c``: PSD, symmetric, and not stable."""
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    exact = isinstance(c, (int, Fraction))
    value = Fraction(c) if exact else float(c)

    def build(T):
        if exact:
            return np.full((T, T), value, dtype=object)
        return np.full((T, T), value)

    return KernelHandle(
        name="constant",
        entry=lambda i, j: value,
        symmetric=True,
        psd_by_construction=True,
        params={"c": c},
        section_builder=build,
        exact=exact,
    )


KERNELS = {
    "counterexample-v": counterexample_v,
    "counterexample-s": counterexample_s,
    "stable-spline": stable_spline,
    "constant": constant_kernel,
}


@dataclass(frozen=True)
class FiniteSection:
    T: int
    matrix: DenseMatrix
    symmetric: bool

    @classmethod
    def from_matrix(cls, M) -> "FiniteSection":
        M = as_matrix(M)
        if M.rows != M.cols:
            raise ValueError("finite sections are square")
        return cls(M.rows, M, M.is_symmetric())


def finite_section(k: KernelHandle, T: int, cap: int = SECTION_CAP) -> FiniteSection:
    """Leading ``T x T`` corner of ``k``."""
    if T < 1:
        raise ValueError("T must be >= 1")
    if T > cap:
        raise BudgetError(f"dense section T={T} exceeds cap {cap}", cap=cap)
    if k.section_builder is not None:
        vals = k.section_builder(T)
    else:
        vals = np.array([[k.entry(i, j) for j in range(1, T + 1)] for i in range(1, T + 1)], dtype=object)
    if k.exact:
        M = DenseMatrix(vals.astype(object), True)
    else:
        M = DenseMatrix(np.asarray(vals, dtype=np.float64), False)
    return FiniteSection(T, M, k.symmetric)


class PSDResult(NamedTuple):
    passed: bool
    min_eigenvalue: float


def psd_check(s, tol: float = 1e-8) -> PSDResult:
    """Eigenvalue test ``min eig >= -tol * max(1, spectral scale)``.

    Raises
    ------
    ContractError
        If the section is not symmetric (exactly, or to 1e-14 for floats).
    """
    if not isinstance(s, FiniteSection):
        s = FiniteSection.from_matrix(s)
    if not s.symmetric or not s.matrix.is_symmetric():
        raise ContractError("psd_check requires a symmetric section")
    w = np.linalg.eigvalsh(s.matrix.to_float())
    lo = float(w[0])
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    return PSDResult(lo >= -tol * max(1.0, scale), lo)


def make_kernel(name: str, **params) -> KernelHandle:
    if name not in KERNELS:
        raise KeyError(f"unknown kernel {name!r}; available: {', '.join(KERNELS)}")
    return KERNELS[name](**params)


def harmonic(t: int) -> Fraction:
    return sum((Fraction(1, h) for h in range(1, t + 1)), Fraction(0))


