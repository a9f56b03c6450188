"""Brute-force reference implementations used as test oracles.

Each one is deliberately naive and structurally different from the
production code it checks.
"""

from __future__ import annotations

import math
from itertools import combinations


def union_measure(intervals) -> int:
    """Number of integer unit cells [t, t+1) covered by any interval."""
    covered = set()
    for iv in intervals:
        covered.update(range(iv.start, iv.end))
    return len(covered)


def covered_cells(intervals) -> set[int]:
    out = set()
    for iv in intervals:
        out.update(range(iv.start, iv.end))
    return out


def cells_to_runs(cells: set[int]) -> list[tuple[int, int]]:
    """Maximal runs of consecutive cells as half-open (start, end) pairs."""
    runs = []
    for t in sorted(cells):
        if runs and runs[-1][1] == t:
            runs[-1][1] = t + 1
        else:
            runs.append([t, t + 1])
    return [tuple(r) for r in runs]


def pairwise_encounters(sessions) -> dict[tuple[int, int], list[tuple[int, int]]]:
    """Compare every session against every other; coalesce on the timeline."""
    cells: dict[tuple[int, int], set[int]] = {}
    for s, r in combinations(sessions, 2):
        if s.node == r.node or s.location != r.location:
            continue
        lo, hi = max(s.interval.start, r.interval.start), min(s.interval.end, r.interval.end)
        if lo < hi:
            pair = (min(s.node, r.node), max(s.node, r.node))
            cells.setdefault(pair, set()).update(range(lo, hi))
    return {pair: cells_to_runs(c) for pair, c in cells.items()}


def temporal_labels(nodes, contacts, source, t_create) -> dict[int, tuple[int, int]]:
    """Earliest arrival, then fewest hops, by Bellman-Ford over all contacts.

    ``contacts`` is an unordered list of (a, b, start). A holder forwards at
    a contact when it got its copy no later than the contact start, so
    contacts sharing a timestamp chain. Arrival times are relaxed first;
    hop counts are then relaxed with those times held fixed, since a node
    forwards the copy it first received. (Relaxing (time, hops) pairs in one
    pass is wrong: a stale late label can leak a too-small hop count.)
    """
    usable = [(a, b, s) for a, b, s in contacts if s >= t_create]
    arrive = {source: t_create}
    changed = True
    while changed:
        changed = False
        for a, b, s in usable:
            for u, v in ((a, b), (b, a)):
                if u in arrive and arrive[u] <= s and s < arrive.get(v, s + 1):
                    arrive[v] = s
                    changed = True
    hops = {source: 0}
    changed = True
    while changed:
        changed = False
        for a, b, s in usable:
            for u, v in ((a, b), (b, a)):
                if u in hops and arrive[u] <= s and v != source and arrive[v] == s:
                    if hops[u] + 1 < hops.get(v, 1 << 60):
                        hops[v] = hops[u] + 1
                        changed = True
    return {v: (arrive[v], hops[v]) for v in arrive if v != source}


def sampled_contacts(positions, online, radio_range, times):
    """Per-sample O(n^2) distance check; runs become [first, last + step)."""
    step = times[1] - times[0] if len(times) > 1 else 1
    out = []
    n = len(positions)
    for i in range(n):
        for j in range(i + 1, n):
            run = None
            for k, t in enumerate(times):
                ok = online[i][k] and online[j][k] and math.dist(positions[i][k], positions[j][k]) <= radio_range
                if ok and run is None:
                    run = t
                elif not ok and run is not None:
                    out.append((i, j, run, times[k - 1] + step))
                    run = None
            if run is not None:
                out.append((i, j, run, times[-1] + step))
    return sorted(out, key=lambda r: (r[2], r[0], r[1], r[3]))
