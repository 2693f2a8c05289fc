"""Finite-truncation diagnostics for kernel stability.

A kernel is stable iff ``sum_i |sum_j K[i, j] u_j| < inf`` for every bounded
``u``.  Finite evidence cannot decide that in general: a single input with
divergent output certifies instability, and a closed-form tail bound
certifies summability (hence stability).  Everything else is reported as
structural evidence or left inconclusive.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from . import finite_norms as fn
from .errors import BudgetError, ConsistencyError
from .kernels import KernelHandle, finite_section

BRUTE_FORCE_T = 20
MIN_FIT_POINTS = 5
R2_ACCEPT = 0.99
CONVERGED_REL_INCREMENT = 1e-3
DIVERGENT_EXPONENT = 0.5
# increments ~ h**-a: a <= 1 + 0.05 is treated as non-summable, a >= 1.2 as summable
NONSUMMABLE_EXPONENT = 1.05
SUMMABLE_EXPONENT = 1.2
TAIL_CERTIFICATE_REL = 0.01
ADDITIVITY_CHECK_T = 40
DEFAULT_SEED = 0


class Verdict(str, enum.Enum):
    SUMMABLE_CERTIFICATE = "summable_certificate"
    BOUNDED_NONSUMMABLE_STRUCTURAL = "bounded_nonsummable_structural"
    DIVERGENT_WITNESS = "divergent_witness"
    INCONCLUSIVE = "inconclusive"


class Growth(str, enum.Enum):
    APPARENTLY_CONVERGENT = "apparently_convergent"
    HARMONIC_LIKE = "harmonic_like"
    POLYNOMIALLY_DIVERGENT = "polynomially_divergent"
    INCONCLUSIVE = "inconclusive"


def _fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope and R^2 of ``y ~ a + b x``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    b, a = np.polyfit(x, y, 1)
    resid = y - (a + b * x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(b), r2


def power_exponent(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Exponent and R^2 of a power-law fit ``y ~ c x**a`` (positive data only)."""
    return _fit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)))


def classify_growth(x: Sequence[float], y: Sequence[float]) -> Growth:
    """Label a non-decreasing sequence of partial sums.

    ``apparently_convergent`` when the last relative increment is below
    1e-3; otherwise, with at least 5 points, the better of a ``c log x`` and
    a ``c x**a`` fit is accepted at R^2 >= 0.99.
    """
    y = [float(v) for v in y]
    if len(y) >= 2 and y[-1] > 0 and (y[-1] - y[-2]) / y[-1] < CONVERGED_REL_INCREMENT:
        return Growth.APPARENTLY_CONVERGENT
    if len(y) < MIN_FIT_POINTS or min(y) <= 0:
        return Growth.INCONCLUSIVE
    c_log, r2_log = _fit(np.log(x), y)
    a_pow, r2_pow = power_exponent(x, y)
    pow_ok = r2_pow >= R2_ACCEPT and a_pow > 0
    log_ok = r2_log >= R2_ACCEPT and c_log > 0
    if pow_ok and (not log_ok or r2_pow > r2_log):
        return Growth.POLYNOMIALLY_DIVERGENT
    if log_ok:
        return Growth.HARMONIC_LIKE
    return Growth.INCONCLUSIVE


def make_input(u_spec, T: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Leading ``T`` entries of a test input with ``|u|_inf = 1``.

    ``u_spec`` is ``"all_ones"``, ``"alternating"``, ``"sign_pattern"``
    (seeded random signs) or an explicit vector (at least ``T`` long).
    """
    if isinstance(u_spec, str):
        if u_spec == "all_ones":
            return np.ones(T, dtype=np.int64)
        if u_spec == "alternating":
            return np.where(np.arange(T) % 2 == 0, 1, -1).astype(np.int64)
        if u_spec == "sign_pattern":
            rng = np.random.default_rng(seed)
            return rng.choice(np.array([-1, 1], dtype=np.int64), size=T)
        raise ValueError(f"unknown input spec {u_spec!r}")
    u = np.asarray(u_spec)
    if len(u) < T:
        raise ValueError(f"explicit input has {len(u)} entries, need {T}")
    u = u[:T]
    if np.max(np.abs(u.astype(float))) > 1:
        raise ValueError("test inputs must satisfy |u_j| <= 1")
    return u


def _section_times(M, u):
    if M.exact:
        uf = np.array([fn._to_fraction(x) for x in u], dtype=object)
        return sum((abs(x) for x in M.values @ uf), Fraction(0))
    return float(np.abs(M.values @ u.astype(np.float64)).sum())


def witness_probe(k: KernelHandle, u_spec, T_list: Iterable[int], seed: int = DEFAULT_SEED) -> list[tuple[int, Any]]:
    """``g(T) = sum_{i<=T} |sum_{j<=T} K[i, j] u_j|`` along ``T_list``.

    Unbounded growth along one input certifies instability; bounded values
    prove nothing.
    """
    T_list = list(T_list)
    if any(b <= a for a, b in zip(T_list, T_list[1:])):
        raise ValueError("T_list must be strictly increasing")
    u_full = make_input(u_spec, T_list[-1], seed)
    out = []
    for T in T_list:
        M = finite_section(k, T).matrix
        out.append((T, _section_times(M, u_full[:T])))
    return out


@dataclass
class SummabilityProbe:
    points: list[tuple[int, Any]]
    classification: Growth
    by_blocks: bool


def summability_probe(k: KernelHandle, T_list: Iterable[int] | None = None, blocks: int | None = None) -> SummabilityProbe:
    """Cumulative entrywise mass of leading sections, or of whole blocks.

    With ``blocks`` the exact per-block masses of the schedule are summed for
    ``t = 1..blocks``; the classification then runs against ``t``.
    """
    if blocks is not None:
        if k.block_schedule is None:
            raise ValueError(f"kernel {k.name} has no block schedule")
        s = k.block_schedule
        pts, total = [], Fraction(0)
        for h in range(1, blocks + 1):
            total += s.block_l1(h)
            pts.append((h, total))
        by_blocks = True
    else:
        pts = [(T, fn.l1_entrywise(finite_section(k, T).matrix)) for T in T_list]
        by_blocks = False
    xs = [p[0] for p in pts]
    cls = classify_growth(xs, [p[1] for p in pts])
    return SummabilityProbe(pts, cls, by_blocks)


def block_increments(k: KernelHandle, blocks: int) -> tuple[list[Fraction], list[Fraction]]:
    """Exact per-block ``(l1 mass, (inf,1) norm)`` for blocks ``1..blocks``."""
    s = k.block_schedule
    if s is None:
        raise ValueError(f"kernel {k.name} has no block schedule")
    return [s.block_l1(h) for h in range(1, blocks + 1)], [s.block_opnorm(h) for h in range(1, blocks + 1)]


def verify_block_additivity(k: KernelHandle, max_T: int = ADDITIVITY_CHECK_T) -> int:
    """Check on dense sections that both norms add over whole blocks.

    For every block boundary whose section fits in ``max_T`` rows: the l1 norm
    must equal the sum of block masses exactly, and the (inf,1) norm must equal
    the sum of block norms, by brute force when the section has at most 20
    columns, else by evaluating the concatenated per-block witnesses (the
    triangle inequality supplies the matching upper bound).  Returns the
    number of boundaries checked.

    Raises
    ------
    ConsistencyError
        On any mismatch.
    """
    s = k.block_schedule
    if s is None:
        raise ValueError(f"kernel {k.name} has no block schedule")
    checked, t = 0, 1
    while s.row_boundary(t) <= max_T:
        R, C = s.row_boundary(t), s.col_boundary(t)
        T = max(R, C)
        M = finite_section(k, T).matrix
        M = fn.DenseMatrix(M.values[:R, :C], M.exact)
        l1_blocks = sum((s.block_l1(h) for h in range(1, t + 1)), Fraction(0))
        op_blocks = sum((s.block_opnorm(h) for h in range(1, t + 1)), Fraction(0))
        if fn.l1_entrywise(M) != l1_blocks:
            raise ConsistencyError(f"l1 additivity fails for {k.name} at block {t}")
        if C <= BRUTE_FORCE_T:
            op = fn.opnorm_inf1_bruteforce(M).opnorm_inf1
        else:
            u = np.concatenate([s.block_witness(h) for h in range(1, t + 1)])
            op = fn.l1_of_product(M, u)
        if op != op_blocks:
            raise ConsistencyError(f"(inf,1) additivity fails for {k.name} at block {t}: {op} != {op_blocks}")
        checked += 1
        t += 1
    return checked


def opnorm_growth(k: KernelHandle, T_list: Iterable[int] | None = None, blocks: int | None = None) -> list[tuple[int, Any, str]]:
    """Leading-section (inf,1) norms as ``(T, value, method)``.

    Each ``T`` is either brute-forced (``T <= 20``) or, for block-diagonal
    kernels, a block boundary whose value is the exact sum of block norms.
    With ``blocks`` the structural sums for ``t = 1..blocks`` are returned
    keyed by block count.

    Raises
    ------
    BudgetError
        When a ``T`` fits neither path.
    """
    s = k.block_schedule
    out = []
    if blocks is not None:
        if s is None:
            raise ValueError(f"kernel {k.name} has no block schedule")
        verify_block_additivity(k)
        total = Fraction(0)
        for h in range(1, blocks + 1):
            total += s.block_opnorm(h)
            out.append((h, total, "block_structural"))
        return out
    verified = False
    for T in T_list:
        if T <= BRUTE_FORCE_T:
            rep = fn.opnorm_inf1_bruteforce(finite_section(k, T).matrix)
            out.append((T, rep.opnorm_inf1, "vertex_enumeration"))
            continue
        t = s.blocks_within(T, T) if s is not None and s.square else 0
        if t == 0 or s.row_boundary(t) != T:
            raise BudgetError(f"T={T} is neither <= {BRUTE_FORCE_T} nor a block boundary of {k.name}")
        if not verified:
            verify_block_additivity(k)
            verified = True
        value = sum((s.block_opnorm(h) for h in range(1, t + 1)), Fraction(0))
        out.append((T, value, "block_structural"))
    return out


@dataclass
class StabilityReport:
    kernel: str
    params: dict
    l1_partial: list[tuple[int, Any]]
    opnorm_partial: list[tuple[int, Any]]
    witness_growth: dict[str, list[tuple[int, Any]]]
    verdict: Verdict
    axis: str = "T"
    notes: list[str] = field(default_factory=list)

    def to_dict(self, exact: bool = False) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return f"{v.numerator}/{v.denominator}" if exact else float(v)
            return float(v)

        return {
            "kernel": self.kernel,
            "params": self.params,
            "axis": self.axis,
            "l1_partial": [[t, enc(v)] for t, v in self.l1_partial],
            "opnorm_partial": [[t, enc(v)] for t, v in self.opnorm_partial],
            "witness_growth": {k: [[t, enc(v)] for t, v in seq] for k, seq in self.witness_growth.items()},
            "verdict": self.verdict.value,
            "notes": list(self.notes),
        }


def default_ladder(T_max: int, points: int = 6) -> list[int]:
    """Roughly geometric truncation sizes ending at ``T_max``."""
    return sorted({max(1, round(T_max / 2**i)) for i in range(points)})


FINITE_NOTE = "finite truncations cannot decide stability in general; verdicts are diagnostic"


def stability_report(
    k: KernelHandle,
    T_max: int = 200,
    blocks: int = 10,
    seed: int = DEFAULT_SEED,
) -> StabilityReport:
    """Run the probes and assign a verdict.

    Rules, in order:

    1. a closed-form tail mass below 1% of the total -> summable certificate;
    2. a test input whose ``g(T)`` fits a power law with exponent >= 0.5 at
       R^2 >= 0.99 -> divergent witness;
    3. block data whose l1 increments are not summable (fitted decay exponent
       <= 1.05) while (inf,1) increments are (exponent >= 1.2) -> bounded but
       not summable, structurally;
    4. otherwise inconclusive.
    """
    notes = [FINITE_NOTE]
    s = k.block_schedule
    if s is not None:
        l1_inc, op_inc = block_increments(k, blocks)
        l1_partial = [(h, v) for h, v in summability_probe(k, blocks=blocks).points]
        opnorm_partial = [(h, v) for h, v, _ in opnorm_growth(k, blocks=blocks)]
        axis = "blocks"
        T_list = [s.row_boundary(t) for t in range(1, blocks + 1) if max(s.row_boundary(t), s.col_boundary(t)) <= min(T_max, 512)]
    else:
        small = [T for T in (2, 4, 8, 16) if T <= T_max]
        T_list = sorted(set(small) | set(default_ladder(T_max)))
        l1_partial = summability_probe(k, T_list).points
        opnorm_partial = opnorm_growth(k, [T for T in T_list if T <= 16])
        opnorm_partial = [(T, v) for T, v, _ in opnorm_partial]
        axis = "T"

    witness_growth = {}
    if T_list:
        for name in ("all_ones", "alternating", "sign_pattern"):
            witness_growth[name] = witness_probe(k, name, T_list, seed=seed)

    verdict = Verdict.INCONCLUSIVE
    if k.tail_mass is not None and k.total_mass:
        tail = k.tail_mass(T_max)
        if tail < TAIL_CERTIFICATE_REL * k.total_mass:
            verdict = Verdict.SUMMABLE_CERTIFICATE
            notes.append(f"closed-form mass {k.total_mass:.6g}, tail beyond T={T_max} is {tail:.3g}")
    if verdict is Verdict.INCONCLUSIVE:
        for name, seq in witness_growth.items():
            xs = [t for t, g in seq if g > 0]
            ys = [float(g) for t, g in seq if g > 0]
            if len(xs) < MIN_FIT_POINTS or any(b < a for a, b in zip(ys, ys[1:])):
                continue
            a, r2 = power_exponent(xs, ys)
            if r2 >= R2_ACCEPT and a >= DIVERGENT_EXPONENT:
                verdict = Verdict.DIVERGENT_WITNESS
                notes.append(f"input {name}: g(T) ~ T^{a:.3f} (R^2={r2:.4f})")
                break
    if verdict is Verdict.INCONCLUSIVE and s is not None and blocks >= MIN_FIT_POINTS:
        hs = list(range(3, blocks + 1))
        a_l1, _ = power_exponent(hs, [float(v) for v in l1_inc[2:]])
        a_op, r2_op = power_exponent(hs, [float(v) for v in op_inc[2:]])
        if -a_l1 <= NONSUMMABLE_EXPONENT and -a_op >= SUMMABLE_EXPONENT and r2_op >= R2_ACCEPT:
            verdict = Verdict.BOUNDED_NONSUMMABLE_STRUCTURAL
            notes.append(
                f"block l1 masses decay like h^{a_l1:.3f} (not summable); "
                f"block (inf,1) norms like h^{a_op:.3f} (summable)"
            )
    return StabilityReport(k.name, dict(k.params), l1_partial, opnorm_partial, witness_growth, verdict, axis, notes)


