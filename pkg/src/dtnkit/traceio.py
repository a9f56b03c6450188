"""Session and contact trace CSV I/O, and WLAN session to encounter conversion.

File formats (comma separated, integer timestamps, no quoting):

* ``sessions.csv``  header ``node,location,start,end``
* ``contacts.csv``  header ``a,b,start,end`` (a < b, sorted by start, a, b)
* ``nodes.map``     lines of ``label,id``
"""

from __future__ import annotations

import logging
import re
from collections import defaultdict
from typing import Iterable, TextIO

from .core import (
    ContactTrace,
    EncounterRecord,
    SessionRecord,
    TimeInterval,
    ValidationError,
    encounter,
    interval_intersection,
    merge_pair_intervals,
)

log = logging.getLogger(__name__)

SESSION_HEADER = ("node", "location", "start", "end")
CONTACT_HEADER = ("a", "b", "start", "end")

_LABEL_RE = re.compile(r"^[A-Za-z0-9:_\-.]+$")


class ParseError(ValueError):
    """A row could not be parsed. Carries the 1-based line number and field."""

    def __init__(self, line: int, field: str | None, message: str):
        self.line = line
        self.field = field
        where = f"line {line}" + (f", field '{field}'" if field else "")
        super().__init__(f"{where}: {message}")


def _rows(stream: Iterable[str], header: tuple[str, ...]):
    """Yield (line_no, fields) for data rows after checking the header."""
    it = iter(stream)
    seen_header = False
    for line_no, raw in enumerate(it, start=1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if not seen_header:
            if tuple(fields) != header:
                raise ParseError(line_no, None, f"expected header {','.join(header)!r}, got {line!r}")
            seen_header = True
            continue
        if len(fields) != len(header):
            raise ParseError(line_no, None, f"expected {len(header)} fields, got {len(fields)}")
        yield line_no, fields
    if not seen_header:
        raise ParseError(1, None, "missing header")


def _int_field(line_no: int, name: str, text: str) -> int:
    try:
        return int(text, 10)
    except ValueError:
        raise ParseError(line_no, name, f"not a base-10 integer: {text!r}") from None


def _label_field(line_no: int, name: str, text: str) -> str:
    if not _LABEL_RE.match(text):
        raise ParseError(line_no, name, f"invalid label {text!r}")
    return text


class NodeLabeler:
    """Maps node labels to dense integer ids.

    Labels that are already non-negative integers keep their value, so files
    written with integer ids parse back unchanged. Other labels (MAC
    addresses and the like) get ids in order of first appearance, skipping
    ids already claimed by integer labels.
    """

    def __init__(self):
        self.ids: dict[str, int] = {}
        self._used: set[int] = set()
        self._next = 0

    def __call__(self, label: str) -> int:
        node = self.ids.get(label)
        if node is not None:
            return node
        if label.isdigit():
            node = int(label)
            if node in self._used:
                raise ValidationError(f"node id {node} already assigned to another label")
        else:
            while self._next in self._used:
                self._next += 1
            node = self._next
        self._used.add(node)
        self.ids[label] = node
        return node


def parse_sessions(
    stream: Iterable[str], *, skipped: list[Exception] | None = None
) -> tuple[list[SessionRecord], dict[str, int]]:
    """Parse ``sessions.csv`` rows.

    Returns the merged session records, sorted by (start, node, location),
    together with the label -> node id dictionary. Same-node same-location
    sessions that overlap or touch are merged into one record.

    Passing a ``skipped`` list switches to lenient mode: invalid rows are
    logged, appended to it and dropped instead of raising.
    """
    labeler = NodeLabeler()
    grouped: dict[tuple[int, str], list[TimeInterval]] = defaultdict(list)
    for line_no, (node_s, loc_s, start_s, end_s) in _rows(stream, SESSION_HEADER):
        try:
            label = _label_field(line_no, "node", node_s)
            loc = _label_field(line_no, "location", loc_s)
            start = _int_field(line_no, "start", start_s)
            end = _int_field(line_no, "end", end_s)
            if start >= end:
                raise ValidationError(f"line {line_no}: start {start} must be < end {end}")
            node = labeler(label)
        except (ParseError, ValidationError) as exc:
            if skipped is None:
                raise
            log.warning("skipping row: %s", exc)
            skipped.append(exc)
            continue
        grouped[(node, loc)].append(TimeInterval(start, end))
    records = [
        SessionRecord(node, loc, iv)
        for (node, loc), ivs in grouped.items()
        for iv in merge_pair_intervals(ivs)
    ]
    records.sort(key=session_sort_key)
    return records, dict(labeler.ids)


def session_sort_key(rec: SessionRecord):
    return (rec.interval.start, rec.node, rec.location, rec.interval.end)


def sessions_to_encounters(sessions: Iterable[SessionRecord]) -> ContactTrace:
    """Two nodes encounter when online under the same location at the same time.

    Each strictly positive overlap of two nodes' sessions at one location is an
    encounter; a pair's encounters across all locations are then merged, so a
    pair roaming together between access points yields one continuous contact.
    """
    sessions = list(sessions)
    by_location: dict[str, list[SessionRecord]] = defaultdict(list)
    for s in sessions:
        by_location[s.location].append(s)

    found: list[EncounterRecord] = []
    for recs in by_location.values():
        # sweep by start time, keeping sessions that may still overlap
        recs.sort(key=lambda r: (r.interval.start, r.node))
        active: list[SessionRecord] = []
        for cur in recs:
            active = [r for r in active if r.interval.end > cur.interval.start]
            for other in active:
                if other.node == cur.node:
                    continue
                iv = interval_intersection(other.interval, cur.interval)
                if iv is not None:
                    found.append(encounter(other.node, cur.node, iv.start, iv.end))
            active.append(cur)
    return ContactTrace.build(found, nodes=(s.node for s in sessions))


def parse_contacts(
    stream: Iterable[str], *, nodes: Iterable[int] = (), skipped: list[Exception] | None = None
) -> ContactTrace:
    """Parse ``contacts.csv`` into a canonical trace.

    Rows may come in any order and with either pair orientation; overlapping
    rows of the same pair are merged. ``nodes`` adds isolated nodes that have
    no contacts (e.g. read from a ``nodes.map`` sidecar).
    """
    records = []
    for line_no, (a_s, b_s, start_s, end_s) in _rows(stream, CONTACT_HEADER):
        try:
            a = _int_field(line_no, "a", a_s)
            b = _int_field(line_no, "b", b_s)
            start = _int_field(line_no, "start", start_s)
            end = _int_field(line_no, "end", end_s)
            if a < 0 or b < 0:
                raise ValidationError(f"line {line_no}: node ids must be non-negative")
            if a == b:
                raise ValidationError(f"line {line_no}: self-contact of node {a}")
            if start >= end:
                raise ValidationError(f"line {line_no}: start {start} must be < end {end}")
        except (ParseError, ValidationError) as exc:
            if skipped is None:
                raise
            log.warning("skipping row: %s", exc)
            skipped.append(exc)
            continue
        records.append(encounter(a, b, start, end))
    return ContactTrace.build(records, nodes=nodes)


def write_contacts(trace: ContactTrace, sink: TextIO) -> None:
    sink.write(",".join(CONTACT_HEADER) + "\n")
    for r in trace.records:
        sink.write(f"{r.a},{r.b},{r.interval.start},{r.interval.end}\n")


def write_sessions(records: Iterable[SessionRecord], sink: TextIO, labels: dict[int, str] | None = None) -> None:
    sink.write(",".join(SESSION_HEADER) + "\n")
    for r in records:
        node = labels[r.node] if labels else r.node
        sink.write(f"{node},{r.location},{r.interval.start},{r.interval.end}\n")


def write_node_map(ids: dict[str, int], sink: TextIO) -> None:
    for label, node in sorted(ids.items(), key=lambda kv: kv[1]):
        sink.write(f"{label},{node}\n")


def parse_node_map(stream: Iterable[str]) -> dict[str, int]:
    out = {}
    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(line_no, None, "expected 'label,id'")
        out[_label_field(line_no, "label", parts[0])] = _int_field(line_no, "id", parts[1])
    return out
