"""Epidemic routing over a contact trace, and the delay/reachability/overhead report."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .core import ContactTrace, NodeId, ValidationError
from .stats import CdfSeries, empirical_cdf

_NEVER = np.iinfo(np.int64).max


@dataclass(frozen=True)
class Message:
    id: int
    source: NodeId
    t_create: int


@dataclass(frozen=True)
class Workload:
    """Messages to flood; every node other than the source is a recipient."""

    messages: tuple[Message, ...]

    def __post_init__(self):
        ids = [m.id for m in self.messages]
        if len(set(ids)) != len(ids):
            raise ValidationError("message ids must be unique")

    @classmethod
    def one_per_node(cls, trace: ContactTrace, t_create: int | None = None) -> Workload:
        """One message per node, created at trace start unless given."""
        if t_create is None:
            span = trace.span
            t_create = span.start if span else 0
        return cls(tuple(Message(i, n, t_create) for i, n in enumerate(sorted(trace.nodes))))


@dataclass(frozen=True)
class DeliveryRecord:
    message: int
    source: NodeId
    dest: NodeId
    t_deliver: int
    hops: int


@dataclass(frozen=True)
class SourceStats:
    message: int
    source: NodeId
    coverage: float
    delay: int | None
    reachability: int | None
    transmissions: int


@dataclass(frozen=True)
class RoutingReport:
    deliveries: tuple[DeliveryRecord, ...]
    per_message: tuple[SourceStats, ...]
    total_transmissions: int
    n_encounters: int
    n_messages: int
    overhead: float
    delay_cdf: CdfSeries | None = None
    reachability_cdf: CdfSeries | None = None
    overhead_cdf: CdfSeries | None = None

    def by_source(self) -> dict[NodeId, SourceStats]:
        return {s.source: s for s in self.per_message}

    def mean_reachability(self) -> float | None:
        vals = [s.reachability for s in self.per_message if s.reachability is not None]
        return sum(vals) / len(vals) if vals else None

    def mean_delay(self) -> float | None:
        vals = [s.delay for s in self.per_message if s.delay is not None]
        return sum(vals) / len(vals) if vals else None

    def mean_coverage(self) -> float | None:
        if not self.per_message:
            return None
        return sum(s.coverage for s in self.per_message) / len(self.per_message)


def run_epidemic(trace: ContactTrace, workload: Workload | None = None) -> RoutingReport:
    """Flood every message over the trace with unbounded buffers and bandwidth.

    Contacts exchange at their start time only. Contacts sharing a start
    time are relaxed together until nothing changes, so a message can chain
    across several simultaneous contacts and each newly reached node keeps
    the smallest hop count available at that instant. A node never receives
    the same message twice, and keeps the hop count of its first copy.
    """
    if workload is None:
        workload = Workload.one_per_node(trace)
    nodes = sorted(trace.nodes)
    index = {n: i for i, n in enumerate(nodes)}
    for m in workload.messages:
        if m.source not in index:
            raise ValidationError(f"message {m.id} has unknown source node {m.source}")
    msgs = workload.messages
    n, k = len(nodes), len(msgs)

    # hops[v, m] is the hop count of v's copy of m (_NEVER if none); arrive likewise
    hops = np.full((n, k), _NEVER, dtype=np.int64)
    arrive = np.full((n, k), _NEVER, dtype=np.int64)
    t_create = np.array([m.t_create for m in msgs], dtype=np.int64)
    pending = sorted(range(k), key=lambda j: msgs[j].t_create)
    src_idx = np.array([index[m.source] for m in msgs], dtype=np.int64)
    copies = np.zeros(k, dtype=np.int64)

    def create_until(t: int):
        while pending and msgs[pending[0]].t_create <= t:
            j = pending.pop(0)
            hops[src_idx[j], j] = 0
            arrive[src_idx[j], j] = msgs[j].t_create

    for start, group in groupby(trace.records, key=lambda r: r.interval.start):
        create_until(start)
        edges = [(index[r.a], index[r.b]) for r in group]
        held_before = hops != _NEVER
        eligible = t_create <= start
        changed = True
        while changed:
            changed = False
            for u, v in edges:
                for x, y in ((u, v), (v, u)):
                    cand = np.where(hops[x] == _NEVER, _NEVER, hops[x] + 1)
                    better = eligible & ~held_before[y] & (cand < hops[y])
                    if better.any():
                        hops[y, better] = cand[better]
                        changed = True
        new = (hops != _NEVER) & ~held_before
        arrive[new] = start
        copies += new.sum(axis=0)
    create_until(math.inf)

    deliveries = []
    per_message = []
    n_enc = len(trace.records)
    for j, m in enumerate(msgs):
        s = src_idx[j]
        reached = [v for v in range(n) if v != s and hops[v, j] != _NEVER]
        for v in reached:
            deliveries.append(DeliveryRecord(m.id, m.source, nodes[v], int(arrive[v, j]), int(hops[v, j])))
        recipients = n - 1
        coverage = len(reached) / recipients if recipients else 0.0
        delay = None
        if recipients and len(reached) == recipients:
            delay = int(max(arrive[v, j] for v in reached)) - m.t_create
        reach = int(max(hops[v, j] for v in reached)) if reached else None
        per_message.append(SourceStats(m.id, m.source, coverage, delay, reach, int(copies[j])))
    total = int(copies.sum())
    return RoutingReport(
        deliveries=tuple(deliveries),
        per_message=tuple(per_message),
        total_transmissions=total,
        n_encounters=n_enc,
        n_messages=k,
        overhead=_overhead(total, n_enc, k),
        delay_cdf=_cdf_or_none(s.delay for s in per_message),
        reachability_cdf=_cdf_or_none(s.reachability for s in per_message),
        overhead_cdf=_cdf_or_none(s.transmissions / n_enc if n_enc else 0.0 for s in per_message),
    )


def _cdf_or_none(values: Iterable) -> CdfSeries | None:
    vals = [v for v in values if v is not None]
    return empirical_cdf(vals) if vals else None


def _overhead(total: int, n_encounters: int, n_messages: int) -> float:
    if n_encounters == 0 or n_messages == 0:
        return 0.0
    return total / (n_encounters * n_messages)


def overhead_ratio(report: RoutingReport, trace: ContactTrace, workload: Workload) -> float:
    """Copies made per encounter per message.

    The raw ``report.total_transmissions`` is kept alongside so other
    normalizations can be derived.
    """
    return _overhead(report.total_transmissions, len(trace.records), len(workload.messages))


# --- summaries and comparison ----------------------------------------------

METRICS = ("reachability", "delay", "overhead", "coverage")


@dataclass
class Summary:
    """Network-level figures for one trace."""

    name: str
    values: dict[str, float | None] = field(default_factory=dict)


def summarize_report(name: str, report: RoutingReport) -> Summary:
    return Summary(
        name,
        {
            "reachability": report.mean_reachability(),
            "delay": report.mean_delay(),
            "overhead": report.overhead,
            "coverage": report.mean_coverage(),
        },
    )


def deviation_pct(ref: float | None, value: float | None) -> float | None:
    """|ref - value| / ref * 100; None when undefined."""
    if ref is None or value is None or ref == 0:
        return None
    return abs(ref - value) / abs(ref) * 100.0


@dataclass
class Comparison:
    names: list[str]
    metrics: list[str]
    values: dict[tuple[str, str], float | None]
    reference: str | None
    deviations: dict[tuple[str, str], float | None]


def summarize(summaries: Sequence[Summary], reference: str | None = None, *, deviations: bool = True) -> Comparison:
    """Side-by-side table of per-trace metrics with deviation from a reference.

    Deviations are reported per trace column; no cross-column aggregate is
    computed.
    """
    if not summaries:
        raise ValueError("need at least one summary")
    names = [s.name for s in summaries]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate trace names: {names}")
    metrics = [m for m in METRICS if any(m in s.values for s in summaries)]
    metrics += sorted({m for s in summaries for m in s.values} - set(metrics))
    values = {(s.name, m): s.values.get(m) for s in summaries for m in metrics}
    devs: dict[tuple[str, str], float | None] = {}
    if deviations:
        if reference is None:
            raise ValueError("deviation requested but no reference trace designated")
        if reference not in names:
            raise ValueError(f"unknown reference trace {reference!r}; have {names}")
        for s in summaries:
            for m in metrics:
                devs[(s.name, m)] = deviation_pct(values[(reference, m)], values[(s.name, m)])
    return Comparison(names, metrics, values, reference, devs)


# --- CSV I/O ---------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_deliveries(report: RoutingReport, sink: TextIO) -> None:
    sink.write("msg,src,dest,t_deliver,hops\n")
    for d in report.deliveries:
        sink.write(f"{d.message},{d.source},{d.dest},{d.t_deliver},{d.hops}\n")


def write_report(report: RoutingReport, sink: TextIO) -> None:
    sink.write("src,coverage,delay,reachability\n")
    for s in report.per_message:
        sink.write(f"{s.source},{_fmt(s.coverage)},{_fmt(s.delay)},{_fmt(s.reachability)}\n")


def write_summary(comparison: Comparison, sink: TextIO) -> None:
    with_dev = bool(comparison.deviations)
    sink.write("trace,metric,value" + (",deviation_pct" if with_dev else "") + "\n")
    for name in comparison.names:
        for m in comparison.metrics:
            row = f"{name},{m},{_fmt(comparison.values[(name, m)])}"
            if with_dev:
                row += f",{_fmt(comparison.deviations[(name, m)])}"
            sink.write(row + "\n")


def read_summaries(stream: Iterable[str]) -> list[Summary]:
    """Parse a ``summary.csv`` (deviation column, if any, is ignored)."""
    lines = [ln.strip() for ln in stream if ln.strip()]
    if not lines or not lines[0].startswith("trace,metric,value"):
        raise ValueError("summary file must start with header 'trace,metric,value'")
    out: dict[str, Summary] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) < 3:
            raise ValueError(f"line {line_no}: expected trace,metric,value")
        name, metric, value = parts[:3]
        out.setdefault(name, Summary(name)).values[metric] = float(value) if value else None
    return list(out.values())


def write_table(comparison: Comparison, sink: TextIO) -> None:
    """Wide layout: one row per metric, one column per trace, then deviations."""
    cols = list(comparison.names)
    dev_cols = [n for n in cols if n != comparison.reference] if comparison.deviations else []
    sink.write(",".join(["metric", *cols, *(f"dev_pct_{n}" for n in dev_cols)]) + "\n")
    for m in comparison.metrics:
        row = [m, *(_fmt(comparison.values[(n, m)]) for n in cols)]
        row += [_fmt(comparison.deviations[(n, m)]) for n in dev_cols]
        sink.write(",".join(row) + "\n")


def format_table(comparison: Comparison) -> str:
    """Plain-text rendering of :func:`write_table` for terminals."""
    cols = list(comparison.names)
    dev_cols = [n for n in cols if n != comparison.reference] if comparison.deviations else []
    header = ["metric", *cols, *(f"%dev {n}" for n in dev_cols)]
    rows = [header]

    def cell(v):
        return "-" if v is None else f"{v:.4g}"

    for m in comparison.metrics:
        rows.append([m, *(cell(comparison.values[(n, m)]) for n in cols),
                     *(cell(comparison.deviations[(n, m)]) for n in dev_cols)])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows)
