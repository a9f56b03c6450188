"""Movement trace and mobility model configuration types."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..core import ValidationError

Point = tuple[float, float]

ROAM = "roam"


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle [x0, x1] x [y0, y1]."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValidationError(f"degenerate rectangle {self}")

    def contains(self, p: Point) -> bool:
        return self.x0 <= p[0] <= self.x1 and self.y0 <= p[1] <= self.y1

    def contains_rect(self, other: Rect) -> bool:
        return self.x0 <= other.x0 and other.x1 <= self.x1 and self.y0 <= other.y0 and other.y1 <= self.y1

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)


@dataclass(frozen=True)
class Arena:
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValidationError(f"arena dimensions must be positive, got {self.width}x{self.height}")

    @property
    def rect(self) -> Rect:
        return Rect(0.0, 0.0, float(self.width), float(self.height))


@dataclass(frozen=True)
class Segment:
    t0: float
    t1: float
    p0: Point
    p1: Point
    online: bool = True

    @property
    def duration(self) -> float:
        return self.t1 - self.t0

    @property
    def speed(self) -> float:
        return math.dist(self.p0, self.p1) / (self.t1 - self.t0)

    def position(self, t: float) -> Point:
        f = (t - self.t0) / (self.t1 - self.t0)
        return (self.p0[0] + (self.p1[0] - self.p0[0]) * f, self.p0[1] + (self.p1[1] - self.p0[1]) * f)


class _SegmentArrays:
    """Column view of one node's segments for vectorized position lookup."""

    def __init__(self, segments: tuple[Segment, ...]):
        n = len(segments)
        self.t0 = np.fromiter((s.t0 for s in segments), float, n)
        self.t1 = np.fromiter((s.t1 for s in segments), float, n)
        self.x0 = np.fromiter((s.p0[0] for s in segments), float, n)
        self.y0 = np.fromiter((s.p0[1] for s in segments), float, n)
        self.x1 = np.fromiter((s.p1[0] for s in segments), float, n)
        self.y1 = np.fromiter((s.p1[1] for s in segments), float, n)
        self.online = np.fromiter((s.online for s in segments), bool, n)

    def sample(self, times: np.ndarray, initial: Point):
        """Positions and online flags at ``times`` (right-continuous)."""
        if len(self.t0) == 0:
            return (
                np.full(len(times), initial[0]),
                np.full(len(times), initial[1]),
                np.zeros(len(times), bool),
            )
        idx = np.searchsorted(self.t0, times, side="right") - 1
        before = idx < 0
        after = times >= self.t1[-1]
        idx = np.clip(idx, 0, len(self.t0) - 1)
        t0, t1 = self.t0[idx], self.t1[idx]
        f = np.clip((times - t0) / (t1 - t0), 0.0, 1.0)
        x = self.x0[idx] + (self.x1[idx] - self.x0[idx]) * f
        y = self.y0[idx] + (self.y1[idx] - self.y0[idx]) * f
        online = self.online[idx] & ~before & ~after
        x[before] = initial[0]
        y[before] = initial[1]
        return x, y, online


@dataclass(frozen=True)
class MovementTrace:
    """Piecewise-linear node trajectories over [0, duration].

    Each node's segments are contiguous in time and cover the whole span;
    offline stretches are stationary segments flagged ``online=False``.
    """

    arena: Arena
    duration: float
    initial: tuple[Point, ...]
    segments: tuple[tuple[Segment, ...], ...] = field(default=())

    @property
    def n_nodes(self) -> int:
        return len(self.initial)

    @property
    def segment_count(self) -> int:
        return sum(len(s) for s in self.segments)

    @cached_property
    def _arrays(self) -> list[_SegmentArrays]:
        return [_SegmentArrays(segs) for segs in self.segments]

    def sample(self, times: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (x, y, online) arrays of shape (n_nodes, len(times))."""
        times = np.asarray(times, dtype=float)
        n = self.n_nodes
        xs = np.empty((n, len(times)))
        ys = np.empty((n, len(times)))
        on = np.empty((n, len(times)), bool)
        for i in range(n):
            xs[i], ys[i], on[i] = self._arrays[i].sample(times, self.initial[i])
        return xs, ys, on

    def online_intervals(self, node: int) -> list[tuple[float, float]]:
        out: list[tuple[float, float]] = []
        for s in self.segments[node]:
            if not s.online:
                continue
            if out and out[-1][1] == s.t0:
                out[-1] = (out[-1][0], s.t1)
            else:
                out.append((s.t0, s.t1))
        return out


def _check_range(name: str, rng: tuple[float, float], *, positive: bool = False) -> tuple[float, float]:
    lo, hi = rng
    if lo < 0 or lo > hi:
        raise ValidationError(f"{name}: need 0 <= min <= max, got [{lo}, {hi}]")
    if positive and lo <= 0:
        raise ValidationError(f"{name}: minimum must be > 0, got {lo}")
    return (float(lo), float(hi))


@dataclass(frozen=True)
class OnOff:
    on_range: tuple[float, float]
    off_range: tuple[float, float]

    def __post_init__(self):
        _check_range("onoff.on_range", self.on_range)
        _check_range("onoff.off_range", self.off_range)
        if self.on_range[1] <= 0:
            raise ValidationError("onoff.on_range: maximum must be > 0")


@dataclass(frozen=True)
class RdConfig:
    arena: Arena
    n_nodes: int
    duration: int
    speed_range: tuple[float, float]
    pause_range: tuple[float, float]
    seed: int
    onoff: OnOff | None = None

    def __post_init__(self):
        if self.n_nodes < 0:
            raise ValidationError(f"n_nodes must be >= 0, got {self.n_nodes}")
        if self.duration < 0:
            raise ValidationError(f"duration must be >= 0, got {self.duration}")
        _check_range("speed_range", self.speed_range, positive=True)
        _check_range("pause_range", self.pause_range)


@dataclass(frozen=True)
class Community:
    id: str
    bounds: Rect


@dataclass(frozen=True)
class Period:
    offset: int
    length: int
    label: str


@dataclass(frozen=True)
class TimePeriodSchedule:
    cycle_length: int
    periods: tuple[Period, ...]

    def __post_init__(self):
        if self.cycle_length <= 0:
            raise ValidationError("schedule.cycle_length must be > 0")
        t = 0
        for p in self.periods:
            if p.offset != t or p.length <= 0:
                raise ValidationError(f"schedule.periods must tile [0, cycle_length) in order; bad period {p.label!r}")
            t += p.length
        if t != self.cycle_length:
            raise ValidationError(f"schedule.periods cover {t}s, expected cycle_length {self.cycle_length}")
        labels = [p.label for p in self.periods]
        if len(set(labels)) != len(labels):
            raise ValidationError("schedule.periods labels must be unique")

    def period_at(self, t: float) -> tuple[Period, float]:
        """Period active at absolute time ``t`` and the absolute time it ends."""
        k, r = divmod(t, self.cycle_length)
        for p in self.periods:
            if p.offset <= r < p.offset + p.length:
                return p, k * self.cycle_length + p.offset + p.length
        raise AssertionError("schedule does not cover time")  # unreachable after validation


@dataclass(frozen=True)
class NodeGroup:
    """Nodes sharing one set of per-period location preferences.

    ``probs`` maps period label -> {community id or "roam": probability}.
    """

    name: str
    size: int
    probs: dict[str, dict[str, float]]


@dataclass(frozen=True)
class TvcConfig:
    arena: Arena
    n_nodes: int
    duration: int
    schedule: TimePeriodSchedule
    communities: tuple[Community, ...]
    groups: tuple[NodeGroup, ...]
    epoch_duration_range: tuple[float, float]
    speed_range: tuple[float, float]
    pause_range: tuple[float, float]
    online_prob: dict[str, float]
    seed: int

    def __post_init__(self):
        if self.n_nodes < 0:
            raise ValidationError(f"n_nodes must be >= 0, got {self.n_nodes}")
        if self.duration < 0:
            raise ValidationError(f"duration must be >= 0, got {self.duration}")
        _check_range("speed_range", self.speed_range, positive=True)
        _check_range("pause_range", self.pause_range)
        _check_range("epoch_duration_range", self.epoch_duration_range, positive=True)
        arena = self.arena.rect
        ids = set()
        for c in self.communities:
            if c.id == ROAM or not c.id:
                raise ValidationError(f"invalid community id {c.id!r}")
            if c.id in ids:
                raise ValidationError(f"duplicate community id {c.id!r}")
            ids.add(c.id)
            if not arena.contains_rect(c.bounds):
                raise ValidationError(f"community {c.id!r} lies outside the arena")
        if sum(g.size for g in self.groups) != self.n_nodes:
            raise ValidationError("group sizes must sum to n_nodes")
        labels = {p.label for p in self.schedule.periods}
        for label in labels:
            p = self.online_prob.get(label)
            if p is None or not 0.0 <= p <= 1.0:
                raise ValidationError(f"online_prob.{label} must be in [0, 1]")
        for g in self.groups:
            for label in labels:
                probs = g.probs.get(label)
                if probs is None:
                    raise ValidationError(f"groups.{g.name}.probs.{label} missing")
                for target, p in probs.items():
                    if target != ROAM and target not in ids:
                        raise ValidationError(f"groups.{g.name}.probs.{label}: unknown community {target!r}")
                    if p < 0:
                        raise ValidationError(f"groups.{g.name}.probs.{label}.{target} is negative")
                if abs(sum(probs.values()) - 1.0) > 1e-9:
                    raise ValidationError(f"groups.{g.name}.probs.{label} must sum to 1")

    def community(self, cid: str) -> Community:
        for c in self.communities:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def group_of(self, node: int) -> NodeGroup:
        n = node
        for g in self.groups:
            if n < g.size:
                return g
            n -= g.size
        raise IndexError(node)
