"""The sign matrices whose rows list every +/-1 pattern of odd length.

For ``p >= 1`` let ``m = 2p + 1`` and ``n = 2**m``.  The matrix ``V`` has ``n``
rows and ``m`` columns; row ``i`` is the sign pattern read off the binary
digits of ``i`` (most significant bit first, 0 -> +1, 1 -> -1).  ``V`` is never
stored: rows are generated from their index, in blocks when streaming.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import BudgetError, ConsistencyError

MATERIALIZE_CAP = 2**20
STREAM_CAP_P = 12
_BLOCK = 1 << 14


@dataclass(frozen=True)
class SignMatrixSpec:
    """Descriptor of the ``2**m x m`` sign matrix, ``m = 2p + 1``."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool) or self.p < 1:
            raise ValueError(f"p must be a positive integer, got {self.p!r}")
        object.__setattr__(self, "p", int(self.p))

    @property
    def m(self) -> int:
        return 2 * self.p + 1

    @property
    def n(self) -> int:
        return 1 << self.m

    @property
    def log2_n(self) -> int:
        return self.m


def sign_rows(m: int, idx: np.ndarray) -> np.ndarray:
    """Rows of the sign matrix for an integer index array, as an int64 array."""
    idx = np.asarray(idx, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    return 1 - 2 * bits


def row(spec: SignMatrixSpec, i: int) -> np.ndarray:
    """Row ``i`` (0-based) as a length-``m`` vector of +/-1."""
    if not 0 <= i < spec.n:
        raise IndexError(f"row index {i} out of range [0, 2^{spec.m})")
    m = spec.m
    return np.array([-1 if (i >> (m - 1 - j)) & 1 else 1 for j in range(m)], dtype=np.int64)


def iter_row_blocks(spec: SignMatrixSpec, block: int = _BLOCK) -> Iterator[np.ndarray]:
    """Yield consecutive row blocks of ``V`` in index order."""
    if spec.m > 62:
        raise BudgetError(f"cannot stream 2^{spec.m} rows")
    for start in range(0, spec.n, block):
        yield sign_rows(spec.m, np.arange(start, min(start + block, spec.n)))


def dense(spec: SignMatrixSpec, cap: int = MATERIALIZE_CAP) -> np.ndarray:
    if spec.n > cap:
        raise BudgetError(f"materializing 2^{spec.m} rows exceeds cap {cap}", cap=cap)
    return sign_rows(spec.m, np.arange(spec.n))


def entrywise_l1(spec: SignMatrixSpec) -> int:
    """Sum of absolute entries: ``m * 2**m``."""
    return spec.m * spec.n


def _opnorm_binomial_sum(spec: SignMatrixSpec) -> int:
    m = spec.m
    total, c = 0, 1
    for h in range(spec.p + 1):
        total += c * (m - 2 * h)
        c = c * (m - h) // (h + 1)
    return 2 * total


def _opnorm_telescoped(spec: SignMatrixSpec) -> int:
    # sum_{h<=p} C(m,h)(m-2h) telescopes to (p+1) C(m, p+1)
    return 2 * (spec.p + 1) * math.comb(spec.m, spec.p + 1)


def opnorm_inf1_closed(spec: SignMatrixSpec) -> int:
    """Exact (inf, 1) norm ``2 * sum_{h=0}^{p} C(m, h) (m - 2h)``.

    The binomial sum is checked against its telescoped form
    ``2 (p + 1) C(m, p + 1)``; a mismatch raises :class:`ConsistencyError`.
    """
    a = _opnorm_binomial_sum(spec)
    b = _opnorm_telescoped(spec)
    if a != b:
        raise ConsistencyError(f"closed forms disagree at p={spec.p}: {a} != {b}")
    return a


class LogValue(NamedTuple):
    log2: float
    value: float | None


def opnorm_inf1_asymptotic(spec: SignMatrixSpec) -> LogValue:
    """Normal-approximation estimate ``2 * 2**m * sqrt(p / pi)``.

    Returned as ``log2`` plus the float value when it fits in a double.
    """
    log2 = 1.0 + spec.m + 0.5 * math.log2(spec.p / math.pi)
    value = 2.0 ** log2 if log2 < 1023 else None
    return LogValue(log2, value)


def log2_int(x: int) -> float:
    """``log2`` of a (possibly huge) positive integer without overflow."""
    if x <= 0:
        raise ValueError("log2 of non-positive integer")
    shift = max(x.bit_length() - 60, 0)
    return math.log2(x >> shift) + shift


def asymptotic_relative_error(spec: SignMatrixSpec) -> float:
    """``|exact / estimate - 1|`` computed in log space."""
    exact = log2_int(opnorm_inf1_closed(spec))
    return abs(2.0 ** (exact - opnorm_inf1_asymptotic(spec).log2) - 1.0)


class Product(NamedTuple):
    l1: float | int
    values: np.ndarray | None


def apply(
    spec: SignMatrixSpec,
    u,
    materialize: bool = False,
    cap: int = MATERIALIZE_CAP,
    max_p: int = STREAM_CAP_P,
) -> Product:
    """Stream ``|V u|_1`` over row blocks without storing ``V``.

    Integer ``u`` gives an exact integer result.  With ``materialize=True``
    the full product vector is also returned (only when ``2**m <= cap``).
    Blocks are reduced in index order, so the result is deterministic.
    """
    u = np.asarray(u)
    if u.shape != (spec.m,):
        raise ValueError(f"u must have length m={spec.m}, got shape {u.shape}")
    if materialize and spec.n > cap:
        raise BudgetError(f"materializing 2^{spec.m} outputs exceeds cap {cap}", cap=cap)
    if spec.p > max_p:
        raise BudgetError(f"streaming 2^{spec.m} rows exceeds p <= {max_p}", cap=max_p)
    integral = np.issubdtype(u.dtype, np.integer)
    if not integral:
        u = u.astype(np.float64)
    total = 0 if integral else 0.0
    parts = []
    for block in iter_row_blocks(spec):
        y = block @ u
        total += int(np.abs(y).sum()) if integral else float(np.abs(y).sum())
        if materialize:
            parts.append(y)
    return Product(total, np.concatenate(parts) if materialize else None)


class OrthogonalityResult(NamedTuple):
    passed: bool
    max_offdiag: int
    gram: np.ndarray


def orthogonality_check(spec: SignMatrixSpec, max_p: int = STREAM_CAP_P) -> OrthogonalityResult:
    """Accumulate ``V^T V`` by streaming and compare with ``2**m I`` exactly."""
    if spec.p > max_p:
        raise BudgetError(f"orthogonality check needs p <= {max_p}", cap=max_p)
    G = np.zeros((spec.m, spec.m), dtype=np.int64)
    for block in iter_row_blocks(spec):
        G += block.T @ block
    off = G - np.diag(np.diag(G))
    max_off = int(np.abs(off).max()) if spec.m > 1 else 0
    passed = max_off == 0 and bool(np.all(np.diag(G) == spec.n))
    return OrthogonalityResult(passed, max_off, G)
