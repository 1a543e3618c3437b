import io
import math
import random

import pytest

from cwilf import cluster_dp, permcore, positive_dp
from cwilf.cluster_dp import (
    EgfReport,
    assemble_counts,
    binomial,
    binomial_row,
    choose_representative,
    cluster_polys,
    cluster_polys_shifted,
    cluster_tables,
    cluster_values,
    dump_cluster_table,
    egf_identity_check,
    extend_cluster,
    load_cluster_table,
    overlap_set,
    split_ending_cluster,
    verify_321_equation,
    _extension_slots,
)
from cwilf.permcore import all_patterns, brute_cluster_enum, brute_weight_enum
from cwilf.weightring import PatternAssignment, WeightPoly
from helpers import factorials

U = WeightPoly.variable(0, 1)
S4_SAMPLE = [(1, 2, 3, 4), (1, 3, 2, 4), (1, 3, 4, 2), (4, 3, 2, 1)]


def test_overlap_set_examples():
    assert overlap_set((1, 3, 2, 4)) == (1, 2)
    assert overlap_set((1, 2, 3)) == (1, 2)
    assert overlap_set((1, 3, 2)) == (1,)
    assert overlap_set((3, 2, 1)) == (1, 2)
    assert overlap_set((2, 1)) == (1,)


def test_overlap_one_is_always_admissible():
    for k in (2, 3, 4):
        for p in all_patterns(k):
            assert 1 in overlap_set(p)


def test_extension_slots_for_1324_match_both_overlap_cases():
    # two-entry overlap: new smallest = old second, new third = old largest + 1
    fixed, free = _extension_slots((1, 3, 2, 4), 2)
    assert fixed == ((1, 2, 0), (3, 4, 1))
    assert free == (2, 4)
    # single-entry overlap: new smallest = old largest
    fixed, free = _extension_slots((1, 3, 2, 4), 1)
    assert fixed == ((1, 4, 0),)
    assert free == (2, 3, 4)


def test_extend_cluster_enumerates_the_constrained_ranges():
    # from last atom values (i1,i2,i3,i4) at length n, the overlap-2
    # extensions are exactly { (i2, j2, i4+1, j4) : i2 < j2 < i4+1 < j4 <= n+2 }
    state, n = (2, 3, 5, 6), 8
    got = extend_cluster(state, n, 2, (1, 3, 2, 4))
    expected = [
        (3, j2, 7, j4)
        for j2 in range(4, 7)
        for j4 in range(8, n + 3)
    ]
    assert sorted(got) == sorted(expected)
    got1 = extend_cluster(state, n, 1, (1, 3, 2, 4))
    expected1 = [
        (6, j2, j3, j4)
        for j2 in range(7, 12)
        for j3 in range(j2 + 1, 12)
        for j4 in range(j3 + 1, 12)
    ]
    assert sorted(got1) == sorted(expected1)


def test_extend_cluster_examples_and_errors():
    assert extend_cluster((1, 2, 3), 3, 2, (1, 2, 3)) == [(2, 3, 4)]
    with pytest.raises(ValueError, match="not admissible"):
        extend_cluster((1, 2, 3), 3, 2, (1, 3, 2))
    with pytest.raises(ValueError, match="invalid cluster state"):
        extend_cluster((3, 2, 1), 3, 1, (1, 2, 3))


def test_cluster_polys_against_oracle():
    for p in all_patterns(3):
        series = cluster_polys(p, 8)
        for n in range(9):
            assert series[n] == brute_cluster_enum(n, p), (p, n)
    for p in S4_SAMPLE:
        series = cluster_polys(p, 8)
        for n in range(9):
            assert series[n] == brute_cluster_enum(n, p), (p, n)


def test_cluster_polys_basics():
    t_minus_1 = WeightPoly(1, {(1,): 1, (0,): -1})
    for p in [(1, 2, 3), (2, 1, 3), (1, 3, 2, 4), (2, 1)]:
        series = cluster_polys(p, len(p) + 1)
        assert all(series[n] == 0 for n in range(len(p)))
        assert series[len(p)] == t_minus_1


def test_aggregated_and_direct_tables_agree():
    for p in [(1, 2, 3), (1, 3, 2), (1, 3, 2, 4), (1, 3, 4, 2), (2, 1)]:
        direct = dict(cluster_tables(p, 10, U, aggregated=False))
        fast = dict(cluster_tables(p, 10, U, aggregated=True))
        assert direct == fast, p


def test_cluster_values_specialize_the_polynomials():
    for p in [(1, 2, 3), (1, 3, 2, 4)]:
        polys = cluster_polys(p, 10)
        for t0 in (0, 1, 2, -1):
            values = cluster_values(p, 10, t0)
            assert values == [c.evaluate([t0]) for c in polys]


def test_u_degree_bounds():
    # r atoms need length between k+(r-1) and k+(r-1)(k-1)
    for p in [(1, 2, 3), (1, 3, 2), (1, 3, 2, 4), (2, 1, 4, 3)]:
        k = len(p)
        shifted = cluster_polys_shifted(p, 12)
        for n, c in enumerate(shifted):
            for (r,), coeff in c.items():
                assert coeff != 0
                assert k + (r - 1) <= n <= k + (r - 1) * (k - 1), (p, n, r)


def test_monotone_pattern_cluster_polys_are_chain_counts():
    # every cluster of an increasing pattern lives on the identity, so the
    # u-coefficients count overlap chains; cross-checked against the oracle
    for k in (3, 4):
        p = tuple(range(1, k + 1))
        series = cluster_polys(p, 9)
        for n in range(10):
            assert series[n] == brute_cluster_enum(n, p)


def test_binomials():
    for n in range(12):
        for r in range(-1, n + 2):
            assert binomial(n, r) == (math.comb(n, r) if 0 <= r <= n else 0)
    assert binomial_row(6) == (1, 6, 15, 20, 15, 6, 1)


def test_assemble_counts_examples():
    P = assemble_counts((1, 2, 3), 3)
    assert P[3] == WeightPoly(1, {(1,): 1, (0,): 5})
    for p in [(1, 2, 3), (1, 3, 2), (1, 3, 2, 4)]:
        P = assemble_counts(p, 15)
        for n, f in enumerate(factorials(15)):
            assert P[n].evaluate([1]) == f


def test_assemble_counts_against_oracle():
    for p in all_patterns(3):
        P = assemble_counts(p, 8)
        a = PatternAssignment.tracking([p])
        for n in range(9):
            assert P[n] == brute_weight_enum(n, 3, a), (p, n)
    for p in S4_SAMPLE:
        P = assemble_counts(p, 8)
        a = PatternAssignment.tracking([p])
        for n in range(9):
            assert P[n] == brute_weight_enum(n, 4, a), (p, n)


def test_assemble_counts_specialized_matches_positive_engine():
    for p, N in [((1, 2, 3), 25), ((1, 3, 2), 25), ((1, 3, 2, 4), 15)]:
        counts = assemble_counts(p, N, t_value=0)
        series = positive_dp.enumerate_series(
            len(p), PatternAssignment.avoiding([p]), N)
        assert counts == [w.constant_value() for w in series]


def test_egf_identity():
    for p, N in [((1, 2, 3), 12), ((1, 3, 2), 12), ((1, 3, 2, 4), 10)]:
        P = assemble_counts(p, N)
        C = cluster_polys(p, N)
        report = egf_identity_check(P, C, N)
        assert isinstance(report, EgfReport)
        assert report.ok
        assert all(not r for r in report.residuals)
    trivial = egf_identity_check([WeightPoly.const(1, 1)], [WeightPoly.zero(1)], 0)
    assert trivial.ok


def test_egf_identity_detects_corruption():
    P = assemble_counts((1, 2, 3), 8)
    C = cluster_polys((1, 2, 3), 8)
    P[5] = P[5] + 1
    assert not egf_identity_check(P, C, 8).ok


def test_verify_321_equation():
    report = verify_321_equation(30)
    assert report.ok
    match = report.matches[0]
    assert (match.sign, match.shift, match.negate_u) == (1, -1, True)
    assert match.verified_to == 30
    assert match.residual_orders == ()
    # the candidate without the variable flip fails beyond the lowest order
    naive = [c for c in report.candidates if not c.negate_u]
    assert naive and all(c.residual_orders for c in naive)
    with pytest.raises(ValueError):
        verify_321_equation(4)


def test_verify_321_lowest_terms():
    # the one-atom cluster: C_3(t) = t - 1
    c = cluster_polys((3, 2, 1), 3)
    assert c[3] == WeightPoly(1, {(1,): 1, (0,): -1})
    # the algebraic equation's series starts at -(t-1)z^2, handled by the
    # shift/negation normalization that verify_321_equation reports
    report = verify_321_equation(10)
    assert all(c.shift == -1 for c in report.candidates)


def test_choose_representative():
    assert choose_representative((1, 2, 3)) == (1, 2, 3)
    assert choose_representative((3, 2, 1)) == (1, 2, 3)
    for q in permcore.symmetry_class((1, 3, 2)):
        assert choose_representative(q) == (1, 3, 2)
    assert choose_representative((4, 2, 3, 1)) == (1, 3, 2, 4)
    # the chosen member never has more overlaps than any classmate
    for p in all_patterns(4):
        rep = choose_representative(p)
        assert len(overlap_set(rep)) <= min(
            len(overlap_set(q)) for q in permcore.symmetry_class(p))


def test_split_ending_cluster_worked_example():
    pi = (1, 5, 7, 4, 2, 3, 6, 8, 9)
    remainder, rest, ending = split_ending_cluster(pi, (1, 5, 6, 7), (1, 2, 3))
    assert ending == (5, 6, 7)
    assert remainder == (1, 5, 7, 4)
    assert rest == (1,)
    # value windows of the ending chain are 236, 368, 689
    windows = [pi[s - 1:s + 2] for s in ending]
    assert windows == [(2, 3, 6), (3, 6, 8), (6, 8, 9)]


def test_split_ending_cluster_whole_chain():
    remainder, rest, ending = split_ending_cluster((1, 2, 3, 4), (1, 2), (1, 2, 3))
    assert remainder == () and rest == () and ending == (1, 2)


def test_split_ending_cluster_errors():
    with pytest.raises(ValueError):
        split_ending_cluster((1, 2, 3, 4), (1,), (1, 2, 3))  # window not at the end
    with pytest.raises(ValueError):
        split_ending_cluster((1, 3, 2, 4), (2,), (1, 2, 3))  # not an occurrence


def test_cluster_table_serialization():
    tables = dict(cluster_tables((1, 3, 2), 9, U))
    buf = io.StringIO()
    dump_cluster_table(tables[9], (1, 3, 2), 9, buf)
    text = buf.getvalue()
    assert text.startswith("CWILF-CTABLE v1\n")
    p, n, loaded = load_cluster_table(io.StringIO(text))
    assert p == (1, 3, 2) and n == 9
    assert loaded == tables[9]
    lines = text.splitlines()[2:]
    keys = [line.split("|")[0] for line in lines]
    assert keys == sorted(keys)
    with pytest.raises(ValueError):
        load_cluster_table(io.StringIO("NOPE\n"))
