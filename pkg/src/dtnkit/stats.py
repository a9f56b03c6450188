"""Encounter statistics and spatio-temporal preference curves."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .core import ContactTrace, NodeId, SessionRecord

HOUR = 3600
DAY = 24 * HOUR


@dataclass(frozen=True)
class CdfSeries:
    """Empirical distribution: (value, P(X <= value)) at each distinct value."""

    points: tuple[tuple[float, float], ...]

    @property
    def values(self) -> list[float]:
        return [v for v, _ in self.points]

    def quantile(self, q: float) -> float:
        """Smallest value v with P(X <= v) >= q."""
        for v, p in self.points:
            if p >= q - 1e-12:
                return v
        return self.points[-1][0]


@dataclass(frozen=True)
class RankedFractionCurve:
    entries: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class ReappearanceCurve:
    entries: tuple[tuple[int, float], ...]

    def at(self, gap: int) -> float:
        return dict(self.entries)[gap]


@dataclass(frozen=True)
class TailFit:
    powerlaw_slope: float
    exp_rate: float
    head_r2: float
    tail_r2: float
    split_value: float
    n_head: int
    n_tail: int


def inter_meeting_times(trace: ContactTrace) -> tuple[list[int], dict[tuple[NodeId, NodeId], list[int]]]:
    """Gaps between consecutive encounters of the same pair.

    Returns the pooled multiset (ordered by pair, then time) and the
    per-pair breakdown. Pairs meeting once contribute nothing.
    """
    per_pair: dict[tuple[NodeId, NodeId], list[int]] = {}
    for pair, ivs in sorted(trace.by_pair().items()):
        gaps = [nxt.start - prev.end for prev, nxt in zip(ivs, ivs[1:])]
        if gaps:
            per_pair[pair] = gaps
    pooled = [g for gaps in per_pair.values() for g in gaps]
    return pooled, per_pair


def meeting_durations(trace: ContactTrace) -> list[int]:
    return [r.interval.duration for r in trace.records]


def location_preference(sessions: Iterable[SessionRecord]) -> RankedFractionCurve:
    """Mean fraction of online time at each node's k-th most visited location.

    Fractions are normalized per node before averaging, so heavy users do not
    dominate. Nodes with fewer than k locations count as 0 at rank k.
    """
    seconds: dict[NodeId, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    for s in sessions:
        seconds[s.node][s.location] += s.interval.duration
    if not seconds:
        return RankedFractionCurve(())
    ranked = []
    for per_loc in seconds.values():
        total = sum(per_loc.values())
        ranked.append(sorted((v / total for v in per_loc.values()), reverse=True))
    depth = max(len(r) for r in ranked)
    entries = []
    for k in range(depth):
        vals = [r[k] if k < len(r) else 0.0 for r in ranked]
        entries.append((k + 1, sum(vals) / len(ranked)))
    return RankedFractionCurve(tuple(entries))


def _presence_bins(sessions: Sequence[SessionRecord], bin_s: int):
    """Set of occupied bin indices per (node, location), plus the span in bins."""
    present: dict[tuple[NodeId, str], set[int]] = defaultdict(set)
    lo = min(s.interval.start for s in sessions) // bin_s
    hi = (max(s.interval.end for s in sessions) - 1) // bin_s
    for s in sessions:
        first = s.interval.start // bin_s
        last = (s.interval.end - 1) // bin_s
        present[(s.node, s.location)].update(range(first, last + 1))
    return present, lo, hi


def reappearance_probability(
    sessions: Iterable[SessionRecord], bin: int = HOUR, max_gap: int = 7 * DAY
) -> ReappearanceCurve:
    """Probability that a node seen at a location is seen there again ``g`` later.

    Time is cut into bins of ``bin`` seconds, aligned to the trace epoch; a
    node is present at a location in a bin when one of its sessions there
    overlaps the bin. For each gap g (a multiple of ``bin``) the probability
    is the share of (node, location, bin t) presences, with t + g still in
    the trace span, that are also present at t + g. Gaps with no eligible
    presences report 0.
    """
    if bin < 1:
        raise ValueError("bin must be >= 1 second")
    if max_gap % bin != 0:
        raise ValueError("max_gap must be a multiple of bin")
    sessions = list(sessions)
    n_gaps = max_gap // bin
    if not sessions:
        return ReappearanceCurve(tuple((k * bin, 0.0) for k in range(1, n_gaps + 1)))
    present, lo, hi = _presence_bins(sessions, bin)
    span = hi - lo + 1
    hits = np.zeros(n_gaps + 1)
    totals = np.zeros(n_gaps + 1)
    for bins in present.values():
        occ = np.zeros(span, dtype=bool)
        occ[np.fromiter(bins, dtype=np.int64) - lo] = True
        n_occ = np.cumsum(occ)
        for k in range(1, min(n_gaps, span - 1) + 1):
            # presences at t with t + k inside the span, and those also present at t + k
            totals[k] += n_occ[span - 1 - k]
            hits[k] += np.count_nonzero(occ[:-k] & occ[k:])
    entries = []
    for k in range(1, n_gaps + 1):
        p = hits[k] / totals[k] if totals[k] > 0 else 0.0
        entries.append((k * bin, float(p)))
    return ReappearanceCurve(tuple(entries))


def empirical_cdf(samples: Iterable[float]) -> CdfSeries:
    arr = np.asarray(list(samples), dtype=float)
    if arr.size == 0:
        raise ValueError("no samples")
    values, counts = np.unique(arr, return_counts=True)
    cum = np.cumsum(counts) / arr.size
    cum[-1] = 1.0
    return CdfSeries(tuple((_plain(v), float(p)) for v, p in zip(values, cum)))


def _plain(v: float):
    return int(v) if float(v).is_integer() else float(v)


def ccdf_points(samples: Iterable[float]) -> tuple[np.ndarray, np.ndarray]:
    """Distinct values and the inclusive survival function P(X >= v)."""
    arr = np.sort(np.asarray(list(samples), dtype=float))
    values, first = np.unique(arr, return_index=True)
    return values, (arr.size - first) / arr.size


def _linfit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and coefficient of determination."""
    if x.size < 2 or np.ptp(x) == 0:
        raise ValueError("degenerate fit: need at least two distinct x values")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


def tail_fit(samples: Iterable[float], head_quantile: float = 0.9, min_samples: int = 50) -> TailFit:
    """Power-law head / exponential tail check on a sample's CCDF.

    The CCDF is split at the ``head_quantile`` sample quantile. The head is
    fitted as a line in (log value, log CCDF), the tail as a line in
    (value, log CCDF); slopes and R^2 of both fits are returned. Non-positive
    samples are dropped from the head fit because the log is undefined.
    """
    if not 0.0 < head_quantile < 1.0:
        raise ValueError("head_quantile must be in (0, 1)")
    arr = np.asarray(list(samples), dtype=float)
    if arr.size < min_samples:
        raise ValueError(f"insufficient samples: {arr.size} < {min_samples}")
    if np.ptp(arr) == 0:
        raise ValueError("degenerate fit: samples have zero variance")
    values, surv = ccdf_points(arr)
    split = float(np.quantile(arr, head_quantile))
    head = (values <= split) & (values > 0)
    tail = values > split
    if head.sum() < 2 or tail.sum() < 2:
        raise ValueError("degenerate fit: head or tail has fewer than two distinct values")
    slope_h, r2_h = _linfit(np.log(values[head]), np.log(surv[head]))
    slope_t, r2_t = _linfit(values[tail], np.log(surv[tail]))
    return TailFit(slope_h, slope_t, r2_h, r2_t, split, int(head.sum()), int(tail.sum()))


# --- CSV writers -----------------------------------------------------------

def write_cdf(series: CdfSeries | None, sink: TextIO) -> None:
    sink.write("value,p\n")
    for v, p in series.points if series else ():
        sink.write(f"{v},{p!r}\n")


def write_preference(curve: RankedFractionCurve, sink: TextIO) -> None:
    sink.write("rank,fraction\n")
    for k, f in curve.entries:
        sink.write(f"{k},{f!r}\n")


def write_reappearance(curve: ReappearanceCurve, sink: TextIO) -> None:
    sink.write("gap_s,prob\n")
    for g, p in curve.entries:
        sink.write(f"{g},{p!r}\n")


def write_tailfit(fit: TailFit, sink: TextIO) -> None:
    for key in ("powerlaw_slope", "exp_rate", "head_r2", "tail_r2", "split_value", "n_head", "n_tail"):
        sink.write(f"{key}={getattr(fit, key)!r}\n")
