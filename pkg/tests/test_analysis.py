import math

import pytest

from cwilf import analysis, cluster_dp, positive_dp
from cwilf.analysis import (
    SeriesReport,
    avoidance_series,
    cross_check,
    growth_estimate,
    hit_parade,
    tracked_series,
)
from cwilf.permcore import all_patterns, brute_weight_enum
from cwilf.weightring import PatternAssignment, WeightPoly
from helpers import factorials


def test_growth_estimate_on_factorials():
    est = growth_estimate(factorials(20))
    assert abs(est.estimate - 1.0) < 1e-9
    assert all(abs(r - 1.0) < 1e-12 for r in est.tail_ratios)


def test_growth_estimate_on_constant_sequence():
    est = growth_estimate([1] * 21)
    assert abs(est.estimate) < 1e-12


def test_growth_estimate_is_scale_free():
    counts = avoidance_series([(1, 2, 3)], 25).terms
    a = growth_estimate(counts)
    b = growth_estimate([7 * c for c in counts])
    assert a.estimate == b.estimate
    assert a.tail_ratios == b.tail_ratios


def test_growth_estimate_validation():
    with pytest.raises(ValueError):
        growth_estimate(factorials(9))
    with pytest.raises(ValueError):
        growth_estimate([1] * 10 + [0] * 5)


def test_avoidance_series_engines_agree():
    for pats in [[(1, 2, 3)], [(1, 3, 2)]]:
        auto = avoidance_series(pats, 8)
        assert auto.method == "cluster"
        positive = avoidance_series(pats, 8, engine="positive")
        brute = avoidance_series(pats, 8, engine="brute")
        assert auto.terms == positive.terms == brute.terms


def test_avoidance_series_empty_and_sets():
    empty = avoidance_series((), 6)
    assert empty.terms == factorials(6)
    assert empty.method == "factorial"
    pair = avoidance_series([(1, 2, 3), (3, 2, 1)], 7)
    assert pair.method == "positive"
    assert pair.terms == avoidance_series([(1, 2, 3), (3, 2, 1)], 7, engine="brute").terms
    with pytest.raises(ValueError):
        avoidance_series([(1, 2, 3), (3, 2, 1)], 7, engine="cluster")


def test_avoidance_series_uses_cheapest_representative():
    rep = avoidance_series([(4, 2, 3, 1)], 6)
    assert rep.representative == "1324"
    assert rep.pattern == "4231"
    assert set(rep.members) == {"1324", "4231"}
    direct = avoidance_series([(1, 3, 2, 4)], 6)
    assert direct.terms == rep.terms


def test_tracked_series_cluster_vs_positive():
    for engine in ("cluster", "positive", "brute"):
        rep = tracked_series([(1, 2, 3)], N=8, engine=engine)
        a = PatternAssignment.tracking([(1, 2, 3)])
        for n in range(9):
            assert rep.terms[n] == brute_weight_enum(n, 3, a), (engine, n)


def test_tracked_series_representative_substitution_is_sound():
    # occurrence counts biject under reverse/complement, so the full
    # polynomials of the representative are the pattern's own
    rep = tracked_series([(3, 2, 1)], N=8)
    assert rep.representative == "123"
    a = PatternAssignment.tracking([(3, 2, 1)])
    for n in range(9):
        assert rep.terms[n] == brute_weight_enum(n, 3, a), n


def test_cross_check_single_pattern():
    report = cross_check([(1, 2, 3)], 8)
    assert report.ok
    assert set(report.methods) == {"brute", "positive", "cluster"}
    assert len(report.rows) == 9
    assert all(row["equal"] for row in report.rows)
    assert report.first_discrepancy is None


def test_cross_check_all_length_3_patterns_to_8():
    # the headline validation property: zero discrepancies anywhere
    for p in all_patterns(3):
        report = cross_check([p], 8)
        assert report.ok, p


def test_cross_check_pattern_set_skips_cluster():
    report = cross_check([(1, 2, 3), (3, 2, 1)], 7)
    assert report.ok
    assert set(report.methods) == {"brute", "positive"}


def test_cross_check_empty_set_gives_factorials():
    report = cross_check((), 6)
    assert report.ok
    fact = [str(f) for f in factorials(6)]
    for n, row in enumerate(report.rows):
        assert set(row["terms"].values()) == {fact[n]}


def test_cross_check_mixed_lengths():
    report = cross_check([(1, 2), (1, 2, 3)], 6)
    assert report.ok
    assert set(report.methods) == {"brute", "positive"}


def test_hit_parade_k3():
    rows = hit_parade(3, 12)
    assert len(rows) == 2
    assert {r.pattern for r in rows} == {"123", "132"}
    by_pattern = {r.pattern: r for r in rows}
    assert set(by_pattern["123"].members) == {"123", "321"}
    assert set(by_pattern["132"].members) == {"132", "213", "231", "312"}
    # the two classes separate by size 6 already
    assert by_pattern["123"].terms[6] != by_pattern["132"].terms[6]
    # ranked by avoider count, descending
    assert rows[0].terms[-1] >= rows[1].terms[-1]


def test_hit_parade_counts_match_positive_engine():
    rows = hit_parade(4, 20)
    assert len(rows) == 8
    for row in rows:
        p = tuple(int(ch) for ch in row.pattern)
        series = positive_dp.enumerate_series(
            4, PatternAssignment.avoiding([p]), 20)
        assert row.terms == [w.constant_value() for w in series], row.pattern
    counts = [r.terms[-1] for r in rows]
    assert counts == sorted(counts, reverse=True)


def test_hit_parade_validation():
    with pytest.raises(ValueError):
        hit_parade(7)
    with pytest.raises(ValueError):
        hit_parade(2)


def test_series_report_json_schema():
    report = avoidance_series([(1, 2, 3)], 5)
    data = report.to_json_dict()
    assert list(data) == ["pattern", "representative", "class", "method",
                          "terms", "growth", "checks"]
    assert data["terms"] == ["1", "1", "2", "5", "17", "70"]
    tracked = tracked_series([(1, 2, 3)], N=3)
    assert tracked.to_json_dict()["terms"][-1] == "t + 5"
