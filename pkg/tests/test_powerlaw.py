"""Rank-frequency construction, trimming, least-squares fits, thinning,
and the synthetic power-law sampler."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zipfunits import (
    BadBand,
    DegeneratePoints,
    EmptyTable,
    NgramTable,
    PowerLawRegressor,
    TooFewPoints,
    fit_powerlaw,
    fit_report,
    rank_frequency,
    sample_zipf,
    sample_zipf_sequence,
    thin,
    trim,
    trim_bounds,
)

# Closed-form OLS oracle for points (1,10),(2,6),(4,5), computed separately:
# slope = Sxy/Sxx in log10, intercept = mean(y) - slope*mean(x).
ORACLE_ETA = 0.5
ORACLE_A = 9.467211571056351
ORACLE_RMSE = 0.03362705307613539

# 1/H_V for eta=1 laws, from exact rational harmonic sums.
INV_H_1000 = 0.13359213049244015
INV_H_10000 = 0.10217002976185846


def table(counts, kind="unit", n=1):
    return NgramTable(n, kind, counts, sum(counts.values()))


def test_rank_frequency_orders_and_ranks():
    rf = rank_frequency(table({("a",): 3, ("c",): 2, ("b",): 1}, kind="word"))
    assert [(e.rank, e.item, e.count) for e in rf.entries] == [
        (1, ("a",), 3),
        (2, ("c",), 2),
        (3, ("b",), 1),
    ]
    assert rf.total == 6
    assert rf.entries[0].rel_freq == 0.5


def test_rank_frequency_tie_break_by_item():
    rf = rank_frequency(table({("b",): 2, ("a",): 2}, kind="word"))
    assert [(e.rank, e.item) for e in rf.entries] == [(1, ("a",)), (2, ("b",))]


def test_rank_frequency_singleton():
    rf = rank_frequency(table({(7,): 5}))
    assert len(rf) == 1
    assert rf.entries[0].rel_freq == 1.0


def test_rank_frequency_rejects_empty():
    with pytest.raises(EmptyTable):
        rank_frequency(NgramTable(1, "unit", {}, 0))


def test_trim_bounds_default_band():
    assert trim_bounds(10000, 0.001, 0.10) == (10, 1000)


def test_trim_defaults_keep_991_points():
    counts = {(i,): 20000 - i for i in range(1, 10001)}
    rf = rank_frequency(table(counts))
    points = trim(rf)
    assert len(points) == 991
    assert points[0][0] == 10 and points[-1][0] == 1000


def test_trim_small_vocab_too_few_points():
    rf = rank_frequency(table({(i,): 10 - i for i in range(1, 6)}))
    with pytest.raises(TooFewPoints):
        trim(rf)  # V=5: band collapses to rank 1 only


def test_trim_bad_band():
    with pytest.raises(BadBand):
        trim_bounds(100, 0.2, 0.1)
    with pytest.raises(BadBand):
        trim_bounds(100, -0.1, 0.5)
    with pytest.raises(BadBand):
        trim_bounds(100, 0.0, 1.5)


def test_fit_exact_power_law():
    points = [(r, 100.0 * r**-1.0) for r in range(1, 101)]
    fit = fit_powerlaw(points)
    assert fit.eta == pytest.approx(1.0, abs=1e-9)
    assert fit.a == pytest.approx(100.0, rel=1e-9)
    assert fit.rmse_log < 1e-12
    assert fit.eta_fixed is False
    assert fit.n_points == 100
    assert (fit.trim_lo_rank, fit.trim_hi_rank) == (1, 100)


def test_fit_fixed_eta_closed_form():
    fit = fit_powerlaw([(1, 4), (2, 2)], fix_eta=1.0)
    assert fit.eta == 1.0
    assert fit.eta_fixed is True
    assert fit.a == pytest.approx(4.0, abs=1e-12)


def test_fit_matches_ols_oracle():
    fit = fit_powerlaw([(1, 10), (2, 6), (4, 5)])
    assert fit.eta == pytest.approx(ORACLE_ETA, abs=1e-12)
    assert fit.a == pytest.approx(ORACLE_A, rel=1e-12)
    assert fit.rmse_log == pytest.approx(ORACLE_RMSE, rel=1e-9)


def test_fit_degenerate_ranks():
    with pytest.raises(DegeneratePoints):
        fit_powerlaw([(3, 5), (3, 9)])


def test_fit_needs_two_points():
    with pytest.raises(TooFewPoints):
        fit_powerlaw([(1, 5)])


def test_two_points_interpolated():
    fit = fit_powerlaw([(2, 50), (9, 3)])
    assert fit.rmse_log < 1e-12


def test_regressor_estimator_api():
    reg = PowerLawRegressor()
    assert reg.get_params() == {"fix_eta": None}
    points = [(r, 100.0 / r) for r in range(1, 20)]
    assert reg.fit(points) is reg
    assert reg.eta_ == pytest.approx(1.0, abs=1e-9)
    assert reg.a_ == pytest.approx(100.0, rel=1e-9)
    preds = reg.predict([1, 10])
    assert preds == pytest.approx([100.0, 10.0], rel=1e-9)
    pinned = PowerLawRegressor(fix_eta=2.0).fit(points)
    assert pinned.eta_ == 2.0
    assert pinned.result_.eta_fixed is True


def test_thin_keeps_ends_and_budget():
    counts = {(i,): 20001 - i for i in range(1, 10001)}
    rf = rank_frequency(table(counts))
    entries = thin(rf, 100)
    assert len(entries) <= 100
    assert entries[0].rank == 1 and entries[-1].rank == 10000
    ranks = [e.rank for e in entries]
    assert ranks == sorted(set(ranks))


def test_thin_identity_when_budget_covers():
    rf = rank_frequency(table({(i,): 5 - i for i in range(1, 4)}))
    assert thin(rf, 10) == rf.entries
    assert thin(rf, 3) == rf.entries


def test_thin_singleton():
    rf = rank_frequency(table({(1,): 2}))
    assert thin(rf, 50) == rf.entries


def test_sample_zipf_uniform_limit():
    t = sample_zipf(4, 0.0, 10**6, seed=123)
    sigma = math.sqrt(0.25 * 0.75 / 10**6)
    for item in range(1, 5):
        freq = t.counts[(item,)] / t.total
        assert abs(freq - 0.25) < 3 * sigma


def test_sample_zipf_single_item():
    t = sample_zipf(1, 1.0, 1000, seed=0)
    assert t.counts == {(1,): 1000}


def test_sample_zipf_harmonic_head():
    t = sample_zipf(1000, 1.0, 10**6, seed=42)
    p = INV_H_1000
    sigma = math.sqrt(p * (1 - p) / 10**6)
    assert abs(t.counts[(1,)] / t.total - p) < 3 * sigma


def test_sample_zipf_deterministic():
    a = sample_zipf(50, 1.0, 5000, seed=9)
    b = sample_zipf(50, 1.0, 5000, seed=9)
    c = sample_zipf(50, 1.0, 5000, seed=10)
    assert a.counts == b.counts
    assert a.counts != c.counts


def test_sample_sequence_matches_table():
    seq = sample_zipf_sequence(50, 1.0, 5000, seed=9)
    t = sample_zipf(50, 1.0, 5000, seed=9)
    values, freqs = np.unique(seq, return_counts=True)
    assert {(int(v),): int(c) for v, c in zip(values, freqs)} == t.counts


def test_fit_report_shape():
    fit = fit_powerlaw([(r, 100.0 / r) for r in range(1, 11)])
    report = fit_report(fit, total_tokens=500, vocab_size=10)
    assert list(report) == [
        "a",
        "eta",
        "eta_fixed",
        "rmse_log",
        "n_points",
        "trim_lo_rank",
        "trim_hi_rank",
        "total_tokens",
        "vocab_size",
    ]
    assert report["total_tokens"] == 500
    assert report["vocab_size"] == 10


tables = st.dictionaries(
    st.integers(min_value=0, max_value=50).map(lambda i: (i,)),
    st.integers(min_value=1, max_value=1000),
    min_size=1,
    max_size=40,
)


@given(tables)
def test_rank_frequency_invariants(counts):
    rf = rank_frequency(table(counts))
    assert len(rf) == len(counts)
    assert [e.rank for e in rf.entries] == list(range(1, len(counts) + 1))
    cs = [e.count for e in rf.entries]
    assert cs == sorted(cs, reverse=True)
    assert sum(cs) == rf.total
    assert abs(sum(e.rel_freq for e in rf.entries) - 1.0) < 1e-9
    for prev, cur in zip(rf.entries, rf.entries[1:]):
        if prev.count == cur.count:
            assert prev.item < cur.item


@given(tables, st.integers(min_value=1, max_value=9))
def test_scale_invariance(counts, c):
    base = rank_frequency(table(counts))
    scaled = rank_frequency(table({k: v * c for k, v in counts.items()}))
    pts = [(e.rank, e.count) for e in base.entries]
    pts_scaled = [(e.rank, e.count) for e in scaled.entries]
    if len(pts) < 2 or len({r for r, _ in pts}) < 2:
        return
    f1 = fit_powerlaw(pts)
    f2 = fit_powerlaw(pts_scaled)
    assert f2.eta == pytest.approx(f1.eta, abs=1e-9)
    assert f2.a == pytest.approx(f1.a * c, rel=1e-9)


@given(tables, st.integers(min_value=2, max_value=30))
def test_thin_is_subsequence(counts, budget):
    rf = rank_frequency(table(counts))
    entries = thin(rf, budget)
    assert len(entries) <= budget
    assert entries[0].rank == 1 and entries[-1].rank == len(rf)
    by_rank = {e.rank: e for e in rf.entries}
    assert all(by_rank[e.rank] == e for e in entries)
