import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from oversquash.causal import (
    TreatmentEffectSet,
    align_pairs,
    ate,
    bonferroni,
    ite,
    mcnemar,
    paired_t,
    responsiveness,
    spearman,
)
from oversquash.decay import decay_matrix
from oversquash.graph import build_graph
from oversquash.metrics import GraphSummary

from conftest import path_graph

# mpmath, 40 digits: mean -0.2, sample std sqrt(1/150), t = -4.898979..., df = 3
T_EXAMPLE = -4.898979485566356196
P_EXAMPLE = 0.016276603459428555313
P_MCNEMAR_5_1 = 0.10247043485974942769


def summary(prev, inten=0.1, var=0.0, ext=0.2):
    return GraphSummary(prev, inten, var, ext, 10, int(prev * 10))


def effects(values, metric="prevalence"):
    out = []
    for i, x in enumerate(values):
        d = dict(prevalence=0.0, intensity=0.0, variability=0.0, extremity=0.0)
        d[metric] = x
        out.append(TreatmentEffectSet(i, **d))
    return out


def test_ite():
    e = ite(summary(0.6), summary(0.45))
    assert e.prevalence == pytest.approx(-0.15, abs=1e-15)
    zero = ite(summary(0.3), summary(0.3))
    assert (zero.prevalence, zero.intensity, zero.variability, zero.extremity) == (0, 0, 0, 0)
    with pytest.raises(ValueError):
        ite(summary(0.3), summary(0.3), graph_id=1, after_id=2)


def test_ate_examples():
    r = ate(effects([0.0, 0.0, 0.0]), "prevalence")
    assert (r.ate, r.p, r.significant) == (0.0, 1.0, False)
    r = ate(effects([0.3, -0.3]), "prevalence")
    assert (r.ate, r.t, r.p) == (0.0, 0.0, 1.0)
    r = ate(effects([-0.2, -0.1, -0.3, -0.2]), "prevalence")
    assert r.ate == pytest.approx(-0.2, abs=1e-15)
    assert r.std == pytest.approx(math.sqrt(1 / 150), abs=1e-15)
    assert r.t == pytest.approx(T_EXAMPLE, abs=1e-12)
    assert r.p == pytest.approx(P_EXAMPLE, abs=1e-12)
    assert r.significant is False  # 0.0163 >= 0.0125


def test_ate_degenerate_nonzero():
    r = ate(effects([0.1, 0.1, 0.1]), "prevalence")
    assert r.p == 0.0 and r.degenerate and r.t is None and r.significant


def test_ate_needs_two():
    with pytest.raises(ValueError):
        ate(effects([0.1]), "prevalence")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=2, max_size=30), st.floats(-1, 1))
def test_ate_linear_and_matches_scipy(values, shift):
    base = ate(effects(values), "prevalence")
    shifted = ate(effects([v + shift for v in values]), "prevalence")
    assert shifted.ate == pytest.approx(base.ate + shift, abs=1e-12)
    assert 0.0 <= base.p <= 1.0
    if base.std > 1e-6:
        assert base.p == pytest.approx(stats.ttest_1samp(values, 0.0).pvalue, rel=1e-7, abs=1e-12)


def test_bonferroni():
    assert bonferroni([0.010, 0.020, 0.0125, 0.9]) == [True, False, False, False]


def test_mcnemar_examples():
    r = mcnemar([True] * 5 + [False] + [True] * 3, [False] * 5 + [True] + [True] * 3)
    assert (r.b, r.c, r.n_pairs) == (5, 1, 9)
    assert r.statistic == pytest.approx(8 / 3, abs=1e-15)
    assert r.p == pytest.approx(P_MCNEMAR_5_1, abs=1e-13)
    sym = mcnemar([True, False], [False, True])
    assert (sym.statistic, sym.p) == (0.0, 1.0)
    none = mcnemar([True, False], [True, False])
    assert none.p == 1.0 and none.flag == "no discordant pairs"


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=50))
def test_mcnemar_swap_invariance(flags):
    before = [a for a, _ in flags]
    after = [b for _, b in flags]
    x, y = mcnemar(before, after), mcnemar(after, before)
    assert (x.statistic, x.p) == (y.statistic, y.p)
    assert (x.b, x.c) == (y.c, y.b)


def test_paired_t_examples():
    same = paired_t([0.1, 0.2, 0.3], [0.1, 0.2, 0.3])
    assert same.p == 1.0 and same.flag == "zero variance"
    r = paired_t([0.5, 0.5, 0.5, 0.5], [0.3, 0.4, 0.2, 0.3])
    assert r.statistic == pytest.approx(T_EXAMPLE, abs=1e-10)
    assert r.p == pytest.approx(P_EXAMPLE, abs=1e-10)
    sym = paired_t([0.0, 0.0], [0.1, -0.1])
    assert (sym.statistic, sym.p) == (0.0, 1.0)
    with pytest.raises(ValueError):
        paired_t([0.1], [0.2])


def test_responsiveness():
    assert responsiveness(-0.12, 0.593) == pytest.approx(-20.236, abs=1e-3)
    assert responsiveness(0.0, 0.4) == 0.0
    assert responsiveness(0.1, 0.0) is None


def test_spearman_examples():
    assert spearman([1, 2, 3, 4], [10, 20, 30, 40]).rho == 1.0
    assert spearman([1, 2, 3, 4], [4, 3, 2, 1]).rho == -1.0
    r = spearman([1, 2, 3, 4], [2, 1, 4, 3])
    assert r.rho == 0.6
    assert r.p == pytest.approx(0.4, abs=1e-12)
    flat = spearman([1, 2, 3], [5, 5, 5])
    assert not flat.defined and flat.rho is None
    with pytest.raises(ValueError):
        spearman([1, 2], [1, 2])


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=3, max_size=25))
def test_spearman_matches_scipy(xy):
    x = [a for a, _ in xy]
    y = [b for _, b in xy]
    r = spearman(x, y)
    if not r.defined:
        assert len(set(x)) == 1 or len(set(y)) == 1
        return
    ref = stats.spearmanr(x, y)
    assert r.rho == pytest.approx(ref.statistic, abs=1e-12)
    if abs(r.rho) < 1:
        assert r.p == pytest.approx(ref.pvalue, abs=1e-9)
    assert 0 <= r.p <= 1


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(-10, 10), st.floats(-10, 10)), min_size=3, max_size=20, unique_by=lambda t: t[0]))
def test_spearman_monotone_transform_invariance(xy):
    x = [a for a, _ in xy]
    y = [b for _, b in xy]
    a = spearman(x, y)
    b = spearman([math.exp(v / 4) for v in x], y)
    assert a.rho == b.rho


def test_align_pairs_counts_churn():
    before = decay_matrix(build_graph(4, [(0, 1), (2, 3)]))
    after = decay_matrix(build_graph(4, [(0, 1), (1, 2), (2, 3)]))
    aligned = align_pairs(before, after)
    assert aligned.before_k.shape == (4,)
    assert aligned.churned == 8


def test_pipeline_reports_are_reproducible():
    g = path_graph(6)
    a, b = decay_matrix(g), decay_matrix(g)
    r1 = align_pairs(a, b)
    r2 = align_pairs(decay_matrix(g), decay_matrix(g))
    assert np.array_equal(r1.before_k, r2.before_k)
    assert mcnemar(r1.before_flags, r1.after_flags) == mcnemar(r2.before_flags, r2.after_flags)
