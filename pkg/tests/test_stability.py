import math
from fractions import Fraction

import numpy as np
import pytest

from stablerkhs import finite_norms as fn
from stablerkhs import kernels as kn
from stablerkhs import sign_matrix as sm
from stablerkhs import stability as st
from stablerkhs.errors import BudgetError

import oracles


def test_witness_probe_constant():
    g = st.witness_probe(kn.constant_kernel(1), "all_ones", [10, 100])
    assert g == [(10, 100), (100, 10000)]


def test_witness_probe_stable_spline_limit():
    g = st.witness_probe(kn.stable_spline(0.5), "all_ones", [10, 40, 80])
    assert [v for _, v in g] == sorted(v for _, v in g)
    assert g[-1][1] == pytest.approx(3, rel=1e-12)
    assert all(v <= 3 + 1e-12 for _, v in g)


def test_witness_probe_counterexample_s_block1():
    V = sm.dense(sm.SignMatrixSpec(1))
    k = kn.counterexample_s()
    for j in range(3):
        assert st.witness_probe(k, V[:, j], [8]) == [(8, Fraction(2, 3))]
    # the all-ones input is annihilated by every Gram block
    assert st.witness_probe(k, "all_ones", [8, 40]) == [(8, 0), (40, 0)]


def test_witness_probe_counterexample_v_any_sign_vector():
    k = kn.counterexample_v()
    rng = np.random.default_rng(2)
    for _ in range(5):
        u = rng.choice([-1, 1], size=3)
        # 8 rows x first block's 3 columns; T=8 includes block-2 columns 4..8 with zero rows
        sec = kn.finite_section(k, 8).matrix
        val = fn.l1_of_product(fn.DenseMatrix(sec.values[:, :3], True), u)
        assert val == Fraction(12, 24)


def test_witness_probe_input_validation():
    k = kn.constant_kernel(1)
    with pytest.raises(ValueError):
        st.witness_probe(k, "all_ones", [10, 5])
    with pytest.raises(ValueError):
        st.witness_probe(k, [2.0, 0, 0], [3])
    with pytest.raises(ValueError):
        st.witness_probe(k, "zigzag", [3])


def test_g_never_exceeds_opnorm():
    for k in (kn.stable_spline(0.6), kn.constant_kernel(1), kn.counterexample_s(), kn.counterexample_v()):
        for name in ("all_ones", "alternating", "sign_pattern"):
            T = 12
            g = st.witness_probe(k, name, [T], seed=4)[0][1]
            op = st.opnorm_growth(k, [T])[0][1]
            assert g <= op + 1e-12


def test_summability_counterexample_s_blocks():
    probe = st.summability_probe(kn.counterexample_s(), blocks=10)
    assert [v for _, v in probe.points] == [oracles.harmonic(t) for t in range(1, 11)]
    assert probe.points[-1][1] == Fraction(7381, 2520)
    assert probe.classification is st.Growth.HARMONIC_LIKE


def test_summability_counterexample_v_blocks():
    probe = st.summability_probe(kn.counterexample_v(), blocks=10)
    assert probe.points[-1][1] == Fraction(7381, 2520)


def test_summability_stable_spline():
    probe = st.summability_probe(kn.stable_spline(0.9), [50, 200, 800])
    vals = [v for _, v in probe.points]
    assert vals == sorted(vals)
    assert all(v <= 171 + 1e-9 for v in vals)
    assert vals[-1] == pytest.approx(171, rel=1e-10)
    assert probe.classification is st.Growth.APPARENTLY_CONVERGENT


def test_summability_matches_section_sums():
    k = kn.counterexample_s()
    probe = st.summability_probe(k, [8, 40])
    assert [v for _, v in probe.points] == [1, Fraction(3, 2)]


def test_classify_growth_polynomial():
    xs = [10, 20, 40, 80, 160]
    assert st.classify_growth(xs, [x**2 for x in xs]) is st.Growth.POLYNOMIALLY_DIVERGENT
    assert st.classify_growth(xs[:3], [1, 5, 9]) is st.Growth.INCONCLUSIVE


def test_opnorm_growth_block_boundaries():
    k = kn.counterexample_s()
    out = st.opnorm_growth(k, [8, 40])
    assert out[0][1] == Fraction(2, 3) and out[0][2] == "vertex_enumeration"
    assert out[1][1] == Fraction(2, 3) + Fraction(4, 15) and out[1][2] == "block_structural"


def test_opnorm_growth_brute_force_constant():
    assert st.opnorm_growth(kn.constant_kernel(1), [5]) == [(5, 25, "vertex_enumeration")]


def test_opnorm_growth_budget():
    with pytest.raises(BudgetError):
        st.opnorm_growth(kn.counterexample_s(), [41])
    with pytest.raises(BudgetError):
        st.opnorm_growth(kn.stable_spline(0.5), [30])


def test_block_additivity_verified():
    assert st.verify_block_additivity(kn.counterexample_s()) == 2
    assert st.verify_block_additivity(kn.counterexample_v()) == 2


def test_block_additivity_on_random_dense_blocks():
    rng = np.random.default_rng(9)
    for _ in range(20):
        a = rng.integers(-4, 5, size=(3, 4))
        b = rng.integers(-4, 5, size=(5, 3))
        M = np.zeros((8, 7), dtype=int)
        M[:3, :4] = a
        M[3:, 4:] = b
        assert oracles.opnorm_by_vertices(M.tolist()) == oracles.opnorm_by_vertices(a.tolist()) + oracles.opnorm_by_vertices(b.tolist())
        assert fn.opnorm_inf1_bruteforce(M).opnorm_inf1 == fn.opnorm_inf1_bruteforce(a).opnorm_inf1 + fn.opnorm_inf1_bruteforce(b).opnorm_inf1


def test_additivity_failure_aborts(monkeypatch):
    k = kn.counterexample_s()
    s = k.block_schedule
    broken = type(s)(**{**s.__dict__, "block_opnorm": lambda h: Fraction(1)})
    bad = type(k)(**{**k.__dict__, "block_schedule": broken})
    with pytest.raises(st.ConsistencyError):
        st.verify_block_additivity(bad)


def test_opnorm_increments_decay_like_three_halves():
    ops = st.opnorm_growth(kn.counterexample_s(), blocks=12)
    vals = [v for _, v, _ in ops]
    inc = [vals[0]] + [b - a for a, b in zip(vals, vals[1:])]
    assert all(b < a for a, b in zip(vals[1:], vals[2:])) is False
    assert all(b > a for a, b in zip(vals, vals[1:]))
    for h in range(5, 12):
        assert abs(float(inc[h] / inc[h - 1]) / (h / (h + 1)) ** 1.5 - 1) <= 0.15


def test_opnorm_partials_below_convergent_comparison():
    # per-block norm n / (h |V|_{inf,1}) < 1 / (2 sqrt(h / pi) h) * C; compare with sum 1/(h sqrt h)
    ops = st.opnorm_growth(kn.counterexample_s(), blocks=20)
    bound = sum(1 / (h * math.sqrt(h)) for h in range(1, 21))
    assert all(float(v) <= bound for _, v, _ in ops)


def test_l1_partials_harmonic_bounds():
    probe = st.summability_probe(kn.counterexample_s(), blocks=20)
    for t, v in probe.points:
        assert math.log(t) < v < math.log(t) + 1 or t == 1


def test_report_stable_spline():
    r = st.stability_report(kn.stable_spline(0.9), T_max=800)
    assert r.verdict is st.Verdict.SUMMABLE_CERTIFICATE
    l1 = [v for _, v in r.l1_partial]
    assert all(v <= 171 * (1 + 1e-12) for v in l1)
    assert abs(l1[-1] / 171 - 1) < 0.01
    assert st.FINITE_NOTE in r.notes


def test_report_constant():
    r = st.stability_report(kn.constant_kernel(1), T_max=100)
    assert r.verdict is st.Verdict.DIVERGENT_WITNESS
    assert all(g == T * T for T, g in r.witness_growth["all_ones"])


def test_report_counterexamples():
    for k in (kn.counterexample_s(), kn.counterexample_v()):
        r = st.stability_report(k, blocks=10)
        assert r.verdict is st.Verdict.BOUNDED_NONSUMMABLE_STRUCTURAL
        assert r.axis == "blocks"
        for (t1, l1), (t2, op) in zip(r.l1_partial, r.opnorm_partial):
            assert t1 == t2 and op <= l1


def test_report_invariants_and_serialization():
    r = st.stability_report(kn.stable_spline(0.5), T_max=64)
    l1 = [v for _, v in r.l1_partial]
    op = [v for _, v in r.opnorm_partial]
    assert l1 == sorted(l1) and op == sorted(op)
    l1_at = dict(r.l1_partial)
    assert all(v <= l1_at[T] + 1e-12 for T, v in r.opnorm_partial)
    d = st.stability_report(kn.counterexample_s(), blocks=3).to_dict(exact=True)
    assert d["l1_partial"][-1] == [3, "11/6"]


def test_report_inconclusive_without_evidence():
    r = st.stability_report(kn.counterexample_s(), blocks=3)
    assert r.verdict is st.Verdict.INCONCLUSIVE
