"""Turning movement traces into contacts, sessions and occupancy figures."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..core import ContactTrace, SessionRecord, TimeInterval, ValidationError, encounter
from .model import Community, MovementTrace, Rect

# Upper bound on rows x samples evaluated per block.
_BLOCK_CELLS = 2_000_000


def sample_times(trace: MovementTrace, sample_step: int) -> np.ndarray:
    if sample_step < 1 or int(sample_step) != sample_step:
        raise ValidationError(f"sample_step must be an integer >= 1, got {sample_step}")
    return np.arange(0, math.ceil(trace.duration), int(sample_step), dtype=np.int64)


class _RunTracker:
    """Finds maximal runs of a constant label per row across sample blocks.

    Label -1 means "nothing"; each finished run is reported as
    (row, label, first_sample_time, last_sample_time + step).
    """

    def __init__(self, rows: int):
        self.prev = np.full(rows, -1, dtype=np.int64)
        self.open = np.zeros(rows, dtype=np.int64)
        self.runs: list[tuple[int, int, int, int]] = []

    def feed(self, labels: np.ndarray, times: np.ndarray):
        ext = np.concatenate([self.prev[:, None], labels], axis=1)
        rows, cols = np.nonzero(ext[:, 1:] != ext[:, :-1])
        for r, c in zip(rows.tolist(), cols.tolist()):
            old, new, t = int(ext[r, c]), int(ext[r, c + 1]), int(times[c])
            if old != -1:
                self.runs.append((r, old, int(self.open[r]), t))
            if new != -1:
                self.open[r] = t
        self.prev = labels[:, -1].copy()

    def close(self, end: int):
        for r in np.nonzero(self.prev != -1)[0].tolist():
            self.runs.append((r, int(self.prev[r]), int(self.open[r]), end))
        self.prev[:] = -1


def _blocks(times: np.ndarray, rows: int):
    size = max(1, _BLOCK_CELLS // max(rows, 1))
    for i in range(0, len(times), size):
        yield times[i:i + size]


def movement_to_contacts(trace: MovementTrace, radio_range: float, sample_step: int = 1) -> ContactTrace:
    """Sample positions every ``sample_step`` seconds and detect proximity.

    A pair is in contact at a sample when both nodes are online and at most
    ``radio_range`` apart. Each maximal run of in-contact samples becomes an
    encounter [first sample, last sample + sample_step).
    """
    if not radio_range > 0:
        raise ValidationError(f"radio_range must be > 0, got {radio_range}")
    times = sample_times(trace, sample_step)
    n = trace.n_nodes
    ia, ib = np.triu_indices(n, 1)
    tracker = _RunTracker(len(ia))
    r2 = float(radio_range) ** 2
    for tb in _blocks(times, len(ia)):
        x, y, on = trace.sample(tb)
        d2 = (x[ia] - x[ib]) ** 2 + (y[ia] - y[ib]) ** 2
        hit = (d2 <= r2) & on[ia] & on[ib]
        tracker.feed(np.where(hit, 0, -1), tb)
    if len(times):
        tracker.close(int(times[-1]) + int(sample_step))
    records = [encounter(int(ia[p]), int(ib[p]), s, e) for p, _, s, e in tracker.runs]
    return ContactTrace.build(records, nodes=range(n))


def _locate(x: np.ndarray, y: np.ndarray, rects: Sequence[Rect]) -> np.ndarray:
    """Index of the first rectangle containing each point, -1 if none."""
    out = np.full(x.shape, -1, dtype=np.int64)
    for k in range(len(rects) - 1, -1, -1):
        r = rects[k]
        inside = (x >= r.x0) & (x <= r.x1) & (y >= r.y0) & (y <= r.y1)
        out[inside] = k
    return out


def movement_to_sessions(
    trace: MovementTrace, communities: Sequence[Community], sample_step: int = 1
) -> list[SessionRecord]:
    """Sessions of online presence inside each community, by sampling.

    Communities are matched in priority order (first match wins). This is the
    synthetic counterpart of WLAN association logs, with communities playing
    the access points.
    """
    times = sample_times(trace, sample_step)
    rects = [c.bounds for c in communities]
    tracker = _RunTracker(trace.n_nodes)
    for tb in _blocks(times, trace.n_nodes):
        x, y, on = trace.sample(tb)
        tracker.feed(np.where(on, _locate(x, y, rects), -1), tb)
    if len(times):
        tracker.close(int(times[-1]) + int(sample_step))
    records = [
        SessionRecord(node, communities[k].id, TimeInterval(s, e)) for node, k, s, e in tracker.runs
    ]
    records.sort(key=lambda r: (r.interval.start, r.node, r.location, r.interval.end))
    return records


def _clip(p0, p1, r: Rect) -> tuple[float, float] | None:
    """Parameter range [lo, hi] within [0, 1] where the segment lies in ``r``."""
    lo, hi = 0.0, 1.0
    for a0, a1, mn, mx in ((p0[0], p1[0], r.x0, r.x1), (p0[1], p1[1], r.y0, r.y1)):
        d = a1 - a0
        if d == 0:
            if a0 < mn or a0 > mx:
                return None
            continue
        u0, u1 = (mn - a0) / d, (mx - a0) / d
        if u0 > u1:
            u0, u1 = u1, u0
        lo, hi = max(lo, u0), min(hi, u1)
        if lo > hi:
            return None
    return lo, hi


def _uncovered(lo: float, hi: float, claimed: list[tuple[float, float]]) -> float:
    """Length of [lo, hi] not covered by the disjoint sorted ``claimed`` list."""
    total = hi - lo
    for c0, c1 in claimed:
        total -= max(0.0, min(hi, c1) - max(lo, c0))
    return total


def _claim(claimed: list[tuple[float, float]], lo: float, hi: float):
    claimed.append((lo, hi))
    claimed.sort()
    merged: list[tuple[float, float]] = []
    for c0, c1 in claimed:
        if merged and c0 <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], c1))
        else:
            merged.append((c0, c1))
    claimed[:] = merged


def trace_location_occupancy(
    trace: MovementTrace, communities: Sequence[Community]
) -> list[dict[str, float]]:
    """Per node, the fraction of online time spent inside each community.

    Computed exactly from the piecewise-linear segments. Overlapping
    communities are resolved in priority order. Fractions sum to at most 1;
    the remainder is time spent roaming outside every community. Nodes
    never online get an empty map.
    """
    out = []
    for segs in trace.segments:
        online = 0.0
        inside = [0.0] * len(communities)
        for s in segs:
            if not s.online:
                continue
            dt = s.t1 - s.t0
            online += dt
            claimed: list[tuple[float, float]] = []
            for k, c in enumerate(communities):
                span = _clip(s.p0, s.p1, c.bounds)
                if span is None:
                    continue
                lo, hi = span
                inside[k] += dt * _uncovered(lo, hi, claimed)
                _claim(claimed, lo, hi)
        if online == 0.0:
            out.append({})
            continue
        out.append({c.id: inside[k] / online for k, c in enumerate(communities) if inside[k] > 0})
    return out


def occupancy_grid(trace: MovementTrace, cells: tuple[int, int] = (10, 10), sample_step: int = 1) -> np.ndarray:
    """Histogram of online node positions on a cells[0] x cells[1] partition."""
    times = sample_times(trace, sample_step)
    w, h = trace.arena.width, trace.arena.height
    grid = np.zeros(cells)
    for tb in _blocks(times, trace.n_nodes):
        x, y, on = trace.sample(tb)
        hist, _, _ = np.histogram2d(x[on], y[on], bins=cells, range=[[0, w], [0, h]])
        grid += hist
    return grid

