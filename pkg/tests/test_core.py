import pytest
from hypothesis import given, strategies as st

from dtnkit.core import (
    ContactTrace,
    EncounterRecord,
    TimeInterval,
    ValidationError,
    encounter,
    interval_intersection,
    merge_pair_intervals,
)

from oracles import covered_cells, union_measure

T = TimeInterval


@st.composite
def intervals(draw, lo=0, hi=60):
    a = draw(st.integers(lo, hi - 1))
    b = draw(st.integers(a + 1, hi))
    return T(a, b)


def test_intersection_of_golden_sessions_rows():
    assert interval_intersection(T(44400343, 76404567), T(64300343, 86895742)) == T(64300343, 76404567)


def test_touching_intervals_do_not_intersect():
    assert interval_intersection(T(0, 10), T(10, 20)) is None


def test_intersection_identity():
    assert interval_intersection(T(0, 10), T(0, 10)) == T(0, 10)


def test_merge_examples():
    assert merge_pair_intervals([T(0, 10), T(5, 20)]) == [T(0, 20)]
    assert merge_pair_intervals([T(0, 10), T(10, 20)]) == [T(0, 20)]
    assert merge_pair_intervals([T(30, 40), T(0, 10)]) == [T(0, 10), T(30, 40)]
    assert merge_pair_intervals([]) == []


def test_interval_rejects_empty():
    with pytest.raises(ValidationError):
        T(5, 5)
    with pytest.raises(ValidationError):
        T(6, 5)


def test_encounter_canonicalizes_pair():
    r = encounter(3, 1, 0, 5)
    assert (r.a, r.b) == (1, 3)
    with pytest.raises(ValidationError):
        EncounterRecord(3, 1, T(0, 5))
    with pytest.raises(ValidationError):
        encounter(2, 2, 0, 5)


def test_trace_rejects_unsorted_and_overlapping():
    with pytest.raises(ValidationError):
        ContactTrace(frozenset({0, 1}), (encounter(0, 1, 10, 20), encounter(0, 1, 0, 5)))
    with pytest.raises(ValidationError):
        ContactTrace(frozenset({0, 1}), (encounter(0, 1, 0, 10), encounter(0, 1, 10, 20)))
    with pytest.raises(ValidationError):
        ContactTrace(frozenset({0}), (encounter(0, 1, 0, 10),))


def test_build_merges_and_sorts():
    tr = ContactTrace.build([encounter(1, 0, 150, 300), encounter(0, 1, 100, 200), encounter(2, 3, 0, 1)], nodes=[7])
    assert [(r.a, r.b, r.interval) for r in tr.records] == [(2, 3, T(0, 1)), (0, 1, T(100, 300))]
    assert tr.nodes == frozenset({0, 1, 2, 3, 7})
    assert tr.span == T(0, 300)


def test_relabel_recanonicalizes():
    tr = ContactTrace.build([encounter(0, 1, 0, 5)])
    out = tr.relabel({0: 9, 1: 4})
    assert out.records[0].pair == (4, 9)


@given(intervals(), intervals())
def test_intersection_commutes_and_is_contained(a, b):
    x = interval_intersection(a, b)
    assert x == interval_intersection(b, a)
    if x is not None:
        assert a.contains(x) and b.contains(x)
    assert (x.duration if x else 0) == len(covered_cells([a]) & covered_cells([b]))


@given(st.lists(intervals(), max_size=12))
def test_merge_matches_timeline_oracle(ivs):
    merged = merge_pair_intervals(ivs)
    assert sum(iv.duration for iv in merged) == union_measure(ivs)
    assert covered_cells(merged) == covered_cells(ivs)
    # disjoint, non-touching, sorted
    for prev, nxt in zip(merged, merged[1:]):
        assert prev.end < nxt.start


@given(st.lists(intervals(), max_size=12))
def test_merge_is_idempotent(ivs):
    merged = merge_pair_intervals(ivs)
    assert merge_pair_intervals(merged) == merged
