"""Shared domain types and interval arithmetic.

Time is integer seconds since a per-trace epoch. Node ids are dense
non-negative integers standing in for anonymized MAC addresses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

NodeId = int
LocationId = str


class ValidationError(ValueError):
    """A value violates a domain invariant."""


@dataclass(frozen=True, order=True)
class TimeInterval:
    start: int
    end: int

    def __post_init__(self):
        if self.start >= self.end:
            raise ValidationError(f"interval start {self.start} must be < end {self.end}")

    @property
    def duration(self) -> int:
        return self.end - self.start

    def contains(self, other: TimeInterval) -> bool:
        return self.start <= other.start and other.end <= self.end


@dataclass(frozen=True)
class SessionRecord:
    node: NodeId
    location: LocationId
    interval: TimeInterval

    def __post_init__(self):
        if self.node < 0:
            raise ValidationError(f"node id must be non-negative, got {self.node}")
        if not self.location:
            raise ValidationError("location label must be non-empty")


@dataclass(frozen=True)
class EncounterRecord:
    a: NodeId
    b: NodeId
    interval: TimeInterval

    def __post_init__(self):
        if self.a == self.b:
            raise ValidationError(f"encounter endpoints must differ, got {self.a} twice")
        if self.a > self.b:
            raise ValidationError(f"encounter pair must be canonical (a < b), got ({self.a}, {self.b})")
        if self.a < 0:
            raise ValidationError(f"node id must be non-negative, got {self.a}")

    @property
    def pair(self) -> tuple[NodeId, NodeId]:
        return (self.a, self.b)

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.interval.start, self.a, self.b, self.interval.end)


def encounter(a: NodeId, b: NodeId, start: int, end: int) -> EncounterRecord:
    """Build an encounter, putting the pair in canonical order."""
    if a > b:
        a, b = b, a
    return EncounterRecord(a, b, TimeInterval(start, end))


@dataclass(frozen=True)
class ContactTrace:
    """Canonical contact trace: sorted records, disjoint intervals per pair."""

    nodes: frozenset[NodeId]
    records: tuple[EncounterRecord, ...] = field(default=())

    def __post_init__(self):
        last_end: dict[tuple[int, int], int] = {}
        prev = None
        for rec in self.records:
            key = rec.sort_key()
            if prev is not None and key < prev:
                raise ValidationError("contact records are not sorted by (start, a, b)")
            prev = key
            if rec.a not in self.nodes or rec.b not in self.nodes:
                raise ValidationError(f"pair ({rec.a}, {rec.b}) references a node outside the node set")
            end = last_end.get(rec.pair)
            if end is not None and rec.interval.start <= end:
                raise ValidationError(f"pair ({rec.a}, {rec.b}) has overlapping or touching intervals")
            last_end[rec.pair] = rec.interval.end

    @classmethod
    def build(cls, records: Iterable[EncounterRecord], nodes: Iterable[NodeId] = ()) -> ContactTrace:
        """Canonicalize arbitrary encounter records into a trace.

        Per-pair intervals that overlap or touch are merged and the result is
        sorted by (start, a, b).
        """
        by_pair: dict[tuple[int, int], list[TimeInterval]] = {}
        for rec in records:
            by_pair.setdefault(rec.pair, []).append(rec.interval)
        merged = [
            EncounterRecord(a, b, iv)
            for (a, b), ivs in by_pair.items()
            for iv in merge_pair_intervals(ivs)
        ]
        merged.sort(key=EncounterRecord.sort_key)
        all_nodes = set(nodes)
        for rec in merged:
            all_nodes.add(rec.a)
            all_nodes.add(rec.b)
        return cls(frozenset(all_nodes), tuple(merged))

    def by_pair(self) -> dict[tuple[NodeId, NodeId], list[TimeInterval]]:
        out: dict[tuple[NodeId, NodeId], list[TimeInterval]] = {}
        for rec in self.records:
            out.setdefault(rec.pair, []).append(rec.interval)
        for ivs in out.values():
            ivs.sort()
        return out

    def relabel(self, mapping: dict[NodeId, NodeId]) -> ContactTrace:
        """Rename nodes; pairs are re-canonicalized and records re-sorted."""
        recs = (encounter(mapping[r.a], mapping[r.b], r.interval.start, r.interval.end) for r in self.records)
        return ContactTrace.build(recs, nodes=(mapping[n] for n in self.nodes))

    @property
    def span(self) -> TimeInterval | None:
        if not self.records:
            return None
        return TimeInterval(
            min(r.interval.start for r in self.records),
            max(r.interval.end for r in self.records),
        )

    def __len__(self):
        return len(self.records)


def interval_intersection(a: TimeInterval, b: TimeInterval) -> TimeInterval | None:
    """Overlap of two intervals, or None when it has no positive duration."""
    start = max(a.start, b.start)
    end = min(a.end, b.end)
    if start < end:
        return TimeInterval(start, end)
    return None


def merge_pair_intervals(intervals: Sequence[TimeInterval]) -> list[TimeInterval]:
    """Coalesce overlapping or touching intervals into a sorted disjoint list."""
    out: list[TimeInterval] = []
    for iv in sorted(intervals):
        if out and iv.start <= out[-1].end:
            if iv.end > out[-1].end:
                out[-1] = TimeInterval(out[-1].start, iv.end)
        else:
            out.append(iv)
    return out
