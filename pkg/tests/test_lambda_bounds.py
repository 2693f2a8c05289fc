import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stablerkhs import finite_norms as fn
from stablerkhs import gram as gm
from stablerkhs import lambda_bounds as lb
from stablerkhs.errors import BudgetError

import oracles


def test_equicorrelation_k6_oracle():
    E = lb.equicorrelation(6, Fraction(-1, 5))
    rows = E.values.tolist()
    assert oracles.opnorm_by_vertices(rows) == Fraction(36, 5)
    assert oracles.l1(rows) == 12
    assert fn.norm_ratio(E) == Fraction(3, 5)


@pytest.mark.parametrize("k", [1, 2])
def test_small_k_gives_one(k):
    rec = lb.lambda_upper_search(k, budget=2000, seed=1)
    assert rec.upper_bound == 1
    assert rec.method is lb.BoundMethod.EXHAUSTIVE
    assert rec.verify()


def test_k1_witness():
    rec = lb.lambda_upper_search(1, budget=10)
    assert rec.witness.values.tolist() == [[1]]


@settings(max_examples=50)
@given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(-1, 1))
def test_two_by_two_psd_ratio_is_one(a, b, corr):
    off = corr * math.sqrt(a * b)
    M = [[Fraction(a), Fraction(off)], [Fraction(off), Fraction(b)]]
    assert fn.norm_ratio(M) == 1


def test_k3_equicorrelation_witness():
    rec = lb.lambda_upper_search(3, budget=1000)
    assert rec.upper_bound <= Fraction(2, 3)
    assert rec.family == "equicorrelation" and rec.params["rho"] == "-1/2"
    assert rec.verify()


def test_k6_bound():
    rec = lb.lambda_upper_search(6, budget=1000)
    assert rec.upper_bound <= Fraction(3, 5)
    assert rec.verify()


def test_search_is_deterministic():
    a = lb.lambda_upper_search(4, budget=300, seed=7)
    b = lb.lambda_upper_search(4, budget=300, seed=7)
    assert a.upper_bound == b.upper_bound
    assert np.array_equal(a.witness.to_float(), b.witness.to_float())


def test_random_search_alone_is_valid():
    cand = lb._random_candidate(4, 200, seed=3)
    assert 0 <= cand.ratio <= 1
    rec = lb.LambdaBoundRecord(4, cand.ratio, cand.witness, cand.method)
    assert rec.verify()


def test_gram_embedding_in_search():
    cand = lb._gram_candidate(9)
    assert cand.ratio == Fraction(2, 3)
    assert lb._gram_candidate(7) is None


def test_search_rejects_large_k():
    with pytest.raises(BudgetError, match="gram_embedding"):
        lb.lambda_upper_search(13)


@pytest.mark.parametrize("k", range(1, 9))
def test_bounds_in_unit_interval_and_nonincreasing(k):
    rec = lb.lambda_upper_search(k, budget=200)
    assert 0 <= rec.upper_bound <= 1
    assert rec.verify()
    if k > 1:
        assert rec.upper_bound <= lb.lambda_upper_search(k - 1, budget=200).upper_bound


def test_embedding_examples():
    rec3 = lb.lambda_upper_search(3, budget=100)
    rec4 = lb.embedding_monotonicity(rec3)
    assert rec4.k == 4 and rec4.upper_bound == Fraction(2, 3) and rec4.verify()

    ident = lb.LambdaBoundRecord(2, Fraction(1), fn.DenseMatrix.from_rows([[1, 0], [0, 1]]), lb.BoundMethod.EXHAUSTIVE)
    padded = lb.embedding_monotonicity(ident)
    assert padded.witness.shape == (3, 3) and fn.norm_ratio(padded.witness) == 1

    M8 = fn.DenseMatrix.from_rows(gm.dense(gm.GramSpec.from_p(1)).tolist())
    rec8 = lb.LambdaBoundRecord(8, Fraction(2, 3), M8, lb.BoundMethod.GRAM_EMBEDDING)
    rec9 = lb.embedding_monotonicity(rec8)
    assert fn.norm_ratio(rec9.witness) == Fraction(2, 3)
    assert fn.l1_entrywise(rec9.witness) == 96


def test_embedding_requires_witness():
    with pytest.raises(ValueError):
        lb.embedding_monotonicity(lb.gram_embedding(2))


def test_fig1_curve_values():
    rows = lb.fig1_curve(40)
    assert rows[0] == (1, 8, pytest.approx(math.sqrt(math.pi / 4)))
    assert rows[1] == (2, 32, pytest.approx(math.sqrt(math.pi / 8)))
    assert rows[0].bound == pytest.approx(0.8862, abs=1e-4)
    assert rows[1].bound == pytest.approx(0.6267, abs=1e-4)
    assert all(b.bound < a.bound for a, b in zip(rows, rows[1:]))
    for r in rows:
        assert r.bound == pytest.approx(math.sqrt(math.pi) / math.sqrt(2 * math.log2(r.n) - 2))


def test_fig1_dominates_gram_ratio():
    rows = lb.fig1_curve(60)
    ratios = [gm.ratio(gm.GramSpec.from_p(r.p)).exact for r in rows]
    assert ratios[0] == Fraction(2, 3) <= rows[0].bound
    p0 = next(r.p for r, x in zip(rows, ratios) if x <= r.bound)
    assert p0 == 1
    assert all(x <= r.bound for r, x in zip(rows, ratios))


def test_fig1_rejects_bad_pmax():
    with pytest.raises(ValueError):
        lb.fig1_curve(0)


def test_vanishing_evidence():
    rep = lb.lambda_vanishes_evidence(120)
    assert rep.bounds[0] == Fraction(2, 3)
    assert rep.monotone
    assert rep.first_below_0_1 == 78
    assert rep.first_below_0_01 is None


def test_first_p_below_thresholds():
    assert lb.first_p_below(0.1) == 78
    p = lb.first_p_below(0.01)
    assert gm.ratio(gm.GramSpec.from_p(p)).exact < Fraction(1, 100)
    assert gm.ratio(gm.GramSpec.from_p(p - 1)).exact >= Fraction(1, 100)
    assert abs(p - math.pi / (4 * 0.01**2)) / p < 0.02


def test_gram_embedding_record():
    rec = lb.gram_embedding(3)
    assert rec.k == 128 and rec.upper_bound == Fraction(16, 35)
