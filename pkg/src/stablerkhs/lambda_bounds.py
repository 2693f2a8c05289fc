"""Upper bounds on the smallest (inf,1)-to-l1 norm ratio of PSD matrices.

``lam(k)`` is the minimum of ``|M|_{inf,1} / |M|_1`` over nonzero symmetric
PSD ``k x k`` matrices.  Computing it exactly is a nonconvex problem; every
value produced here is an upper bound realized by an explicit witness.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, NamedTuple

import numpy as np

from . import finite_norms as fn
from . import gram as gm
from .errors import BudgetError, ConsistencyError
from .finite_norms import DenseMatrix

SEARCH_MAX_K = 12
DEFAULT_BUDGET = 10_000
FAMILY_STEPS = 200


class BoundMethod(str, enum.Enum):
    EXHAUSTIVE = "exhaustive"
    FAMILY_SCAN = "family_scan"
    RANDOM_SEARCH = "random_search"
    GRAM_EMBEDDING = "gram_embedding"
    FIG1_CURVE = "fig1_curve"


@dataclass(frozen=True)
class LambdaBoundRecord:
    k: int
    upper_bound: Fraction | float
    witness: DenseMatrix | None
    method: BoundMethod
    family: str = ""
    params: dict[str, Any] = field(default_factory=dict)

    def verify(self, atol: float = 1e-10) -> bool:
        """Recompute the witness ratio and check it is PSD and matches the bound."""
        if self.witness is None:
            return 0 <= self.upper_bound <= 1
        W = self.witness
        if not W.is_symmetric():
            return False
        w = np.linalg.eigvalsh(W.to_float())
        if w[0] < -1e-8 * max(1.0, float(np.abs(w).max())):
            return False
        r = fn.norm_ratio(W)
        return 0 <= self.upper_bound <= 1 and abs(float(r) - float(self.upper_bound)) <= atol


def equicorrelation(k: int, rho) -> DenseMatrix:
    """``(1 - rho) I + rho J``, PSD for ``-1/(k-1) <= rho <= 1``."""
    rho = Fraction(rho)
    vals = np.full((k, k), rho, dtype=object)
    for i in range(k):
        vals[i, i] = Fraction(1)
    return DenseMatrix(vals, True)


def _sign_table(k: int) -> np.ndarray:
    # every sign vector with first entry +1, as columns
    t = np.arange(1 << max(k - 1, 0), dtype=np.int64)
    U = np.ones((k, len(t)), dtype=np.float64)
    for j in range(1, k):
        U[j] = 1 - 2 * ((t >> (j - 1)) & 1)
    return U


def _screen(Ms: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Float ratio for a stack of matrices (screening only; winners are rechecked exactly)."""
    op = np.abs(Ms @ U).sum(axis=1).max(axis=1)
    return op / np.abs(Ms).sum(axis=(1, 2))


class _Candidate(NamedTuple):
    ratio: Fraction
    witness: DenseMatrix
    method: BoundMethod
    family: str
    params: dict


def _family_candidate(k: int, steps: int) -> _Candidate:
    if k == 1:
        W = DenseMatrix.from_rows([[1]])
        return _Candidate(Fraction(1), W, BoundMethod.FAMILY_SCAN, "equicorrelation", {"rho": "0"})
    lo = Fraction(-1, k - 1)
    rhos = [lo + (1 - lo) * Fraction(i, steps - 1) for i in range(steps)]
    U = _sign_table(k)
    Ms = np.stack([equicorrelation(k, r).to_float() for r in rhos])
    psd = np.linalg.eigvalsh(Ms)[:, 0] >= -1e-12
    scores = np.where(psd, _screen(Ms, U), np.inf)
    order = np.argsort(scores, kind="stable")
    best = None
    # exact recheck of the few best screened values guards against float ties
    for i in order[:3]:
        W = equicorrelation(k, rhos[i])
        r = fn.norm_ratio(W)
        if best is None or r < best.ratio:
            best = _Candidate(r, W, BoundMethod.FAMILY_SCAN, "equicorrelation", {"rho": str(rhos[i])})
    return best


def _random_candidate(k: int, budget: int, seed: int, batch: int = 256) -> _Candidate | None:
    if budget <= 0:
        return None
    rng = np.random.default_rng(seed)
    U = _sign_table(k)
    best_score, best_M = np.inf, None
    done = 0
    while done < budget:
        b = min(batch, budget - done)
        A = rng.standard_normal((b, k, k))
        Ms = A @ np.swapaxes(A, 1, 2)
        Ms = 0.5 * (Ms + np.swapaxes(Ms, 1, 2))
        scores = _screen(Ms, U)
        i = int(np.argmin(scores))
        if scores[i] < best_score:
            best_score, best_M = scores[i], Ms[i]
        done += b
    W = DenseMatrix.from_rows(best_M.tolist(), exact=True)
    return _Candidate(fn.norm_ratio(W), W, BoundMethod.RANDOM_SEARCH, "gaussian_gram", {"seed": seed, "samples": budget})


def _gram_candidate(k: int) -> _Candidate | None:
    g = gm.GramSpec.from_p(1)
    if k < g.n:
        return None
    W = DenseMatrix.from_rows(gm.dense(g).tolist())
    for _ in range(k - g.n):
        W = W.pad_leading_zero()
    return _Candidate(fn.norm_ratio(W), W, BoundMethod.GRAM_EMBEDDING, "sign_gram", {"p": 1, "padding": k - g.n})


def lambda_upper_search(k: int, budget: int = DEFAULT_BUDGET, seed: int = 0) -> LambdaBoundRecord:
    """Smallest ratio found over a structured family, Gram embeddings and random PSD samples.

    Deterministic for a given ``seed``.  For ``k <= 2`` the result is always
    1: a 2x2 PSD matrix is matched by the sign vector with
    ``u1 u2 = sign(M12)``, so both norms coincide.

    Raises
    ------
    BudgetError
        For ``k > 12``; use :func:`gram_embedding` for large sizes.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > SEARCH_MAX_K:
        raise BudgetError(
            f"lambda search is limited to k <= {SEARCH_MAX_K}; use gram_embedding for larger k",
            cap=SEARCH_MAX_K,
        )
    candidates = [_family_candidate(k, FAMILY_STEPS), _gram_candidate(k), _random_candidate(k, budget, seed)]
    best = None
    for c in candidates:
        if c is not None and (best is None or c.ratio < best.ratio):
            best = c
    method = best.method
    if k <= 2:
        if best.ratio != 1:
            raise ConsistencyError(f"found ratio {best.ratio} < 1 for k={k}")
        method = BoundMethod.EXHAUSTIVE
    return LambdaBoundRecord(k, best.ratio, best.witness, method, best.family, best.params)


def embedding_monotonicity(record: LambdaBoundRecord) -> LambdaBoundRecord:
    """Carry a ``k`` bound to ``k + 1`` through ``diag(0, M)``; both norms are preserved."""
    if record.witness is None:
        raise ValueError("embedding needs an explicit witness matrix")
    W = record.witness
    P = W.pad_leading_zero()
    if fn.l1_entrywise(P) != fn.l1_entrywise(W):
        raise ConsistencyError("l1 norm changed under zero padding")
    if fn.opnorm_inf1_bruteforce(P).opnorm_inf1 != fn.opnorm_inf1_bruteforce(W).opnorm_inf1:
        raise ConsistencyError("(inf,1) norm changed under zero padding")
    params = dict(record.params, padded_from=record.k)
    return LambdaBoundRecord(record.k + 1, record.upper_bound, P, record.method, record.family, params)


def gram_embedding(p: int) -> LambdaBoundRecord:
    """Bound at ``k = 2**(2p+1)`` from the sign Gram matrix, via closed forms (no witness stored)."""
    g = gm.GramSpec.from_p(p)
    r = gm.ratio(g).exact
    return LambdaBoundRecord(g.n, r, None, BoundMethod.GRAM_EMBEDDING, "sign_gram", {"p": p})


class Fig1Row(NamedTuple):
    p: int
    n: int
    bound: float


def curve_value(p: int) -> float:
    """``sqrt(pi) / sqrt(2 log2 n(p) - 2)`` with ``n(p) = 2**(2p+1)``, i.e. ``sqrt(pi / 4p)``."""
    log2n = 2 * p + 1
    return math.sqrt(math.pi) / math.sqrt(2 * log2n - 2)


def fig1_curve(p_max: int) -> list[Fig1Row]:
    """Piecewise-constant asymptotic bound, one row per step ``p = 1..p_max``.

    The value is constant on ``n(p) <= n < n(p+1)``.
    """
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    return [Fig1Row(p, 1 << (2 * p + 1), curve_value(p)) for p in range(1, p_max + 1)]


def first_p_below(eps: float) -> int:
    """Smallest ``p`` with exact Gram ratio ``< eps`` (ratios decrease in ``p``)."""
    if not 0 < eps:
        raise ValueError("eps must be positive")
    eps = Fraction(eps)

    def below(p):
        return gm.ratio(gm.GramSpec.from_p(p)).exact < eps

    if below(1):
        return 1
    hi = 2
    while not below(hi):
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if below(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class VanishingReport:
    rows: list[tuple[int, int, Fraction]]
    monotone: bool
    first_below_0_1: int | None
    first_below_0_01: int | None

    @property
    def bounds(self) -> list[Fraction]:
        return [r[2] for r in self.rows]


def lambda_vanishes_evidence(p_max: int = 200) -> VanishingReport:
    """Tabulate exact Gram-ratio bounds at ``n(p)`` for ``p = 1..p_max``.

    The threshold crossings are reported only when they fall inside the table;
    :func:`first_p_below` finds them for any threshold.
    """
    if p_max < 3:
        raise ValueError("p_max must be >= 3")
    rows = []
    for p in range(1, p_max + 1):
        g = gm.GramSpec.from_p(p)
        rows.append((p, g.n, gm.ratio(g).exact))
    vals = [r[2] for r in rows]
    monotone = all(b < a for a, b in zip(vals, vals[1:]))

    def first(eps):
        e = Fraction(eps)
        return next((p for p, _, r in rows if r < e), None)

    return VanishingReport(rows, monotone, first(Fraction(1, 10)), first(Fraction(1, 100)))
