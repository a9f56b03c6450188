"""Random Direction and Time-Variant Community trace synthesis."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..core import ValidationError
from .model import (
    ROAM,
    MovementTrace,
    OnOff,
    Point,
    RdConfig,
    Rect,
    Segment,
    TvcConfig,
)

# Distances below this are treated as "already on the wall".
_EPS = 1e-9

DirectionSource = Callable[[int, np.random.Generator], float]


def node_rng(seed: int, node: int) -> np.random.Generator:
    """Independent stream for one node; adding nodes leaves others untouched."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(node,)))


def travel_to_boundary(p: Point, theta: float, region: Rect) -> tuple[Point, float]:
    """Straight-line travel from ``p`` along ``theta`` until the region's edge.

    Returns the stopping point (snapped exactly onto the wall) and the
    distance travelled.
    """
    dx, dy = math.cos(theta), math.sin(theta)
    x, y = p
    tx = ty = math.inf
    if dx > _EPS:
        tx = (region.x1 - x) / dx
    elif dx < -_EPS:
        tx = (region.x0 - x) / dx
    if dy > _EPS:
        ty = (region.y1 - y) / dy
    elif dy < -_EPS:
        ty = (region.y0 - y) / dy
    d = max(0.0, min(tx, ty))
    ex, ey = x + dx * d, y + dy * d
    if tx <= ty:
        ex = region.x1 if dx > 0 else region.x0
    if ty <= tx:
        ey = region.y1 if dy > 0 else region.y0
    ex = min(max(ex, region.x0), region.x1)
    ey = min(max(ey, region.y0), region.y1)
    return (ex, ey), d


def inward_normal(p: Point, region: Rect) -> float | None:
    """Heading of the inward normal if ``p`` sits on the region's edge.

    Corners use the diagonal. Returns None for interior points.
    """
    nx = ny = 0.0
    if p[0] <= region.x0:
        nx = 1.0
    elif p[0] >= region.x1:
        nx = -1.0
    if p[1] <= region.y0:
        ny = 1.0
    elif p[1] >= region.y1:
        ny = -1.0
    if nx == 0.0 and ny == 0.0:
        return None
    return math.atan2(ny, nx)


class _TrackBuilder:
    """Accumulates contiguous segments for one node."""

    def __init__(self, start: Point):
        self.pos = start
        self.t = 0.0
        self.segments: list[Segment] = []

    def move(self, t1: float, p1: Point, online: bool = True):
        if t1 <= self.t:
            return
        self.segments.append(Segment(self.t, t1, self.pos, p1, online))
        self.t = t1
        self.pos = p1

    def hold(self, t1: float, online: bool):
        self.move(t1, self.pos, online)


class _Mover:
    """Random-direction motion inside a region, one leg at a time.

    A leg is (duration, end point): either a straight run to the region's
    edge or a pause. Legs interrupted by a window boundary keep their
    remainder in ``pending`` so motion resumes where it stopped.
    """

    def __init__(self, rng: np.random.Generator, region: Rect, speed_range, pause_range,
                 direction: DirectionSource | None = None, node: int = 0):
        self.rng = rng
        self.region = region
        self.speed_range = speed_range
        self.pause_range = pause_range
        self.direction = direction
        self.node = node
        self.pending: list[tuple[float, Point]] = []

    def _speed(self) -> float:
        return float(self.rng.uniform(*self.speed_range))

    def _theta(self, pos: Point) -> float:
        if self.direction is not None:
            return self.direction(self.node, self.rng)
        normal = inward_normal(pos, self.region)
        if normal is None:
            return float(self.rng.uniform(0.0, 2.0 * math.pi))
        # cosine law about the inward normal
        return normal + math.asin(float(self.rng.uniform(-1.0, 1.0)))

    def _refill(self, pos: Point):
        for _ in range(1000):
            end, dist = travel_to_boundary(pos, self._theta(pos), self.region)
            if dist > _EPS:
                break
        else:
            raise RuntimeError(f"could not leave wall at {pos}")
        self.pending.append((dist / self._speed(), end))
        pause = float(self.rng.uniform(*self.pause_range))
        if pause > 0:
            self.pending.append((pause, end))

    def retarget(self, region: Rect, pos: Point):
        """Switch region; queue a straight transit to a random point if outside."""
        self.region = region
        self.pending.clear()
        if not region.contains(pos):
            dest = (float(self.rng.uniform(region.x0, region.x1)), float(self.rng.uniform(region.y0, region.y1)))
            self.pending.append((math.dist(pos, dest) / self._speed(), dest))

    def run(self, track: _TrackBuilder, t_end: float):
        """Advance the node's motion until ``t_end``, cutting the last leg."""
        while track.t < t_end:
            if not self.pending:
                self._refill(track.pos)
            dur, end = self.pending[0]
            if track.t + dur <= t_end:
                self.pending.pop(0)
                track.move(track.t + dur, end)
            else:
                f = (t_end - track.t) / dur
                p = track.pos
                mid = (p[0] + (end[0] - p[0]) * f, p[1] + (end[1] - p[1]) * f)
                self.pending[0] = (dur - (t_end - track.t), end)
                track.move(t_end, mid)


def _uniform_point(rng: np.random.Generator, r: Rect) -> Point:
    return (float(rng.uniform(r.x0, r.x1)), float(rng.uniform(r.y0, r.y1)))


def _onoff_windows(rng: np.random.Generator, onoff: OnOff, duration: float):
    t = 0.0
    online = True
    while t < duration:
        rng_ = onoff.on_range if online else onoff.off_range
        length = float(rng.uniform(*rng_))
        if length > 0:
            yield t, min(t + length, duration), online
            t += length
        online = not online


def synthesize_rd(
    config: RdConfig,
    *,
    start_positions: list[Point] | None = None,
    direction: DirectionSource | None = None,
) -> MovementTrace:
    """Random Direction model, optionally with on/off presence.

    Each node starts at a uniform position, then repeatedly draws a heading
    and a uniform speed, travels straight to the arena boundary, and pauses.
    The first heading is uniform on [0, 2*pi); headings drawn while standing
    on a wall follow the cosine law about the inward normal, which is what
    keeps the long-run occupancy of moving nodes flat across the arena.
    Pauses are spent on the boundary, so non-zero pauses add weight to the
    edge and corner cells.
    With ``config.onoff`` the node alternates online and offline stretches
    and stays put while offline; motion resumes mid-leg when it returns.

    ``start_positions`` and ``direction`` override the random draws; they
    exist so geometry can be tested against hand-computed trajectories.
    """
    arena = config.arena.rect
    initial, tracks = [], []
    for node in range(config.n_nodes):
        rng = node_rng(config.seed, node)
        start = _uniform_point(rng, arena)
        if start_positions is not None:
            start = tuple(map(float, start_positions[node]))
            if not arena.contains(start):
                raise ValidationError(f"start position {start} outside arena")
        initial.append(start)
        track = _TrackBuilder(start)
        mover = _Mover(rng, arena, config.speed_range, config.pause_range, direction, node)
        if config.onoff is None:
            mover.run(track, config.duration)
        else:
            for t0, t1, online in _onoff_windows(rng, config.onoff, config.duration):
                if online:
                    mover.run(track, t1)
                else:
                    track.hold(t1, online=False)
        tracks.append(tuple(track.segments))
    return MovementTrace(config.arena, config.duration, tuple(initial), tuple(tracks))


def _draw_target(rng: np.random.Generator, probs: dict[str, float]) -> str:
    # sorted keys: draw order must not depend on config-file key order
    keys = sorted(probs)
    weights = np.array([probs[k] for k in keys], dtype=float)
    return keys[int(rng.choice(len(keys), p=weights / weights.sum()))]


def synthesize_tvc(config: TvcConfig) -> MovementTrace:
    """Time-Variant Community model.

    Time is cut into schedule periods. For every period instance a node is
    online with that period's ``online_prob`` and frozen otherwise. Online
    time is split into epochs (uniform length, truncated at the period end);
    each epoch the node picks a community or roaming from its group's
    preferences for the period, travels into the chosen rectangle if needed,
    and moves random-direction style inside it.
    """
    arena = config.arena.rect
    regions = {c.id: c.bounds for c in config.communities}
    regions[ROAM] = arena
    schedule = config.schedule
    initial, tracks = [], []
    for node in range(config.n_nodes):
        rng = node_rng(config.seed, node)
        group = config.group_of(node)
        first = schedule.periods[0] if config.duration == 0 else schedule.period_at(0)[0]
        start = _uniform_point(rng, regions[_draw_target(rng, group.probs[first.label])])
        initial.append(start)
        track = _TrackBuilder(start)
        mover = _Mover(rng, arena, config.speed_range, config.pause_range)
        t = 0.0
        while t < config.duration:
            period, period_end = schedule.period_at(t)
            period_end = min(period_end, config.duration)
            if rng.random() >= config.online_prob[period.label]:
                track.hold(period_end, online=False)
                t = period_end
                continue
            while t < period_end:
                epoch_end = min(t + float(rng.uniform(*config.epoch_duration_range)), period_end)
                target = _draw_target(rng, group.probs[period.label])
                mover.retarget(regions[target], track.pos)
                mover.run(track, epoch_end)
                t = epoch_end
        tracks.append(tuple(track.segments))
    return MovementTrace(config.arena, config.duration, tuple(initial), tuple(tracks))
