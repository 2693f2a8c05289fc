"""Desk-scale checks of every closed form against an independent route.

Each check returns ``(passed, detail)``.  Module attributes are looked up at
call time so a patched function is what gets checked.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable

import numpy as np

from . import finite_norms as fn
from . import gram as gm
from . import kernels as kn
from . import lambda_bounds as lb
from . import sign_matrix as sm
from . import stability as st


@dataclass(frozen=True)
class Check:
    label: str
    sizes: str
    run: Callable[[int], tuple[bool, str]]


def _vertex_optimality(seed):
    rng = np.random.default_rng(seed)
    for p in (1, 2):
        spec = sm.SignMatrixSpec(p)
        top = sm.opnorm_inf1_closed(spec)
        worst = max(sm.apply(spec, rng.uniform(-1, 1, spec.m)).l1 for _ in range(200))
        if worst > top + 1e-9:
            return False, f"p={p}: interior point {worst} beats {top}"
    return True, "200 random interior points per p"


def _sign_invariance(seed):
    for p in range(1, 5):
        spec = sm.SignMatrixSpec(p)
        vals = {sm.apply(spec, np.array(u, dtype=np.int64)).l1 for u in product((1, -1), repeat=spec.m)}
        if len(vals) != 1:
            return False, f"p={p}: values {sorted(vals)[:4]}"
    return True, "all sign vectors, p<=4"


def _closed_form(seed):
    for p in (1, 2):
        spec = sm.SignMatrixSpec(p)
        brute = fn.opnorm_inf1_bruteforce(sm.dense(spec)).opnorm_inf1
        closed = sm.opnorm_inf1_closed(spec)
        if brute != closed:
            return False, f"p={p}: closed {closed} != enumeration {brute}"
    return True, "12, 60"


def _asymptotics(seed):
    e10 = sm.asymptotic_relative_error(sm.SignMatrixSpec(10))
    e50 = sm.asymptotic_relative_error(sm.SignMatrixSpec(50))
    return e50 <= 0.05 and e50 < e10, f"rel. error {e10:.4f} (p=10), {e50:.4f} (p=50)"


def _lambda_props(seed):
    recs = [lb.lambda_upper_search(k, budget=500, seed=seed) for k in range(1, 7)]
    if any(not 0 <= r.upper_bound <= 1 for r in recs):
        return False, "bound outside [0, 1]"
    if recs[0].upper_bound != 1 or recs[1].upper_bound != 1:
        return False, "k<=2 bound differs from 1"
    padded = lb.embedding_monotonicity(recs[2])
    if padded.upper_bound != recs[2].upper_bound or not padded.verify():
        return False, "zero padding changed the ratio"
    return True, "bounds " + ", ".join(f"{float(r.upper_bound):.4f}" for r in recs)


def _orthogonality(seed):
    for p in (1, 2, 3):
        res = sm.orthogonality_check(sm.SignMatrixSpec(p))
        if not res.passed:
            return False, f"p={p}: max off-diagonal {res.max_offdiag}"
    return True, "V^T V = n I exactly"


def _mstar_dominates(seed):
    g = gm.GramSpec.from_p(1)
    mn = fn.opnorm_inf1_bruteforce(gm.dense(g)).opnorm_inf1
    ms = gm.mstar_value(g, seed=seed)
    return ms.numeric_max >= mn - 1e-6 and ms.value >= mn, f"M_n={mn}, M*_n numeric {ms.numeric_max:.6f}"


def _boundary_max(seed):
    for p in (1, 2, 3):
        g = gm.GramSpec.from_p(p)
        res = gm.mstar_value(g, seed=seed)
        if not (res.numeric_max >= 0.999 * g.n**2 and res.on_boundary):
            return False, f"p={p}: numeric max {res.numeric_max}"
    return True, "ascent reaches n^2 on the sphere"


def _parseval(seed):
    rng = np.random.default_rng(seed)
    for p in (1, 2):
        g = gm.GramSpec.from_p(p)
        for _ in range(100):
            if not gm.parseval_identity_check(g, rng.standard_normal(g.m)).passed:
                return False, f"p={p}: float identity failed"
        a = [Fraction(int(x), 7) for x in rng.integers(-9, 10, g.m)]
        if not gm.parseval_identity_check(g, a).passed:
            return False, f"p={p}: exact identity failed"
    return True, "100 random a per p, plus exact rationals"


def _gram_ratio(seed):
    r1 = gm.ratio(gm.GramSpec.from_p(1)).exact
    seq = [gm.ratio(gm.GramSpec.from_p(p)).exact for p in range(1, 11)]
    dev = gm.ratio(gm.GramSpec.from_p(50)).deviation
    ok = r1 == Fraction(2, 3) and all(b < a for a, b in zip(seq, seq[1:])) and dev <= 0.05
    return ok, f"ratio(1)={r1}, deviation(50)={dev:.4f}"


def _gram_norm(seed):
    g = gm.GramSpec.from_p(1)
    M = gm.dense(g)
    rep = fn.opnorm_inf1_bruteforce(M)
    V = sm.dense(g.base)
    cols_ok = all(fn.l1_of_product(M, V[:, j]) == g.n**2 for j in range(g.m))
    return rep.opnorm_inf1 == gm.opnorm_inf1_value(g) == 64 and cols_ok, f"enumeration {rep.opnorm_inf1}"


def _counterexample_v(seed):
    k = kn.counterexample_v()
    s = k.block_schedule
    for p in range(1, 11):
        spec = sm.SignMatrixSpec(p)
        if s.block_l1(p) != Fraction(1, p):
            return False, f"block {p} mass {s.block_l1(p)}"
        if s.block_opnorm(p) != Fraction(sm.opnorm_inf1_closed(spec), p * spec.m * spec.n):
            return False, f"block {p} norm"
    st.verify_block_additivity(k)
    b30 = float(s.block_opnorm(30))
    ref = 1 / (30 * math.sqrt(math.pi * 30))
    return abs(b30 / ref - 1) <= 0.10, f"block 30 norm / asymptote = {b30 / ref:.4f}"


def _counterexample_s(seed):
    k = kn.counterexample_s()
    probe = st.summability_probe(k, blocks=10)
    if probe.points[-1][1] != Fraction(7381, 2520):
        return False, f"mass after 10 blocks {probe.points[-1][1]}"
    ops = st.opnorm_growth(k, blocks=10)
    inc = [ops[0][1]] + [b[1] - a[1] for a, b in zip(ops, ops[1:])]
    for h in range(5, 10):
        ratio = float(inc[h] / inc[h - 1])
        if abs(ratio / (h / (h + 1)) ** 1.5 - 1) > 0.15:
            return False, f"increment ratio at h={h}: {ratio}"
    for T in (8, 40):
        if not kn.psd_check(kn.finite_section(k, T)).passed:
            return False, f"section T={T} not PSD"
    return True, f"norm partial sum after 10 blocks {float(ops[-1][1]):.6f}"


def _fig1(seed):
    rows = lb.fig1_curve(20)
    ok = abs(rows[0].bound - math.sqrt(math.pi / 4)) <= 1e-12
    ok &= all(b.bound < a.bound for a, b in zip(rows, rows[1:]))
    ok &= all(gm.ratio(gm.GramSpec.from_p(r.p)).exact <= r.bound for r in rows[1:])
    return ok, f"curve(1)={rows[0].bound:.6f}, curve(2)={rows[1].bound:.6f}"


CHECKS: list[Check] = [
    Check("Lemma 1", "p=1,2", _vertex_optimality),
    Check("Lemma 2", "p<=4", _sign_invariance),
    Check("Lemma 3", "p=1,2", _closed_form),
    Check("Lemma 4", "p=10,50", _asymptotics),
    Check("Lemma 5", "k=1..6", _lambda_props),
    Check("Lemma 6", "p=1,2,3", _orthogonality),
    Check("Lemma 7", "p=1", _mstar_dominates),
    Check("Lemma 8", "p=1,2,3", _boundary_max),
    Check("Lemma 9", "p=1,2", _parseval),
    Check("Lemma 10", "p=1..10,50", _gram_ratio),
    Check("Theorem M_n = n^2", "p=1", _gram_norm),
    Check("Counterexample 1", "blocks 1..10,30", _counterexample_v),
    Check("Counterexample 2", "blocks 1..10", _counterexample_s),
    Check("Fig. 1", "p=1..20", _fig1),
]


def run_checks(seed: int = 0, fail_fast: bool = False, echo: Callable[[str], None] | None = None) -> list[tuple[Check, bool, str]]:
    results = []
    for check in CHECKS:
        try:
            ok, detail = check.run(seed)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((check, ok, detail))
        if echo is not None:
            echo(f"{check.label} ({check.sizes}): {'PASS' if ok else 'FAIL'}  [{detail}]")
        if fail_fast and not ok:
            break
    return results
