"""movement.csv I/O and mobility model configuration files (YAML)."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Iterable, TextIO

import yaml

from ..core import ValidationError
from ..traceio import ParseError
from .model import (
    Arena,
    Community,
    MovementTrace,
    NodeGroup,
    OnOff,
    Period,
    RdConfig,
    Rect,
    Segment,
    TimePeriodSchedule,
    TvcConfig,
)

MOVEMENT_HEADER = ("node", "t0", "x0", "y0", "t1", "x1", "y1", "online")

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def _num(x: float) -> str:
    # repr round-trips floats exactly; integral values print without ".0"
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def write_movement(trace: MovementTrace, sink: TextIO) -> None:
    sink.write(",".join(MOVEMENT_HEADER) + "\n")
    for node, segs in enumerate(trace.segments):
        for s in segs:
            sink.write(
                f"{node},{_num(s.t0)},{_num(s.p0[0])},{_num(s.p0[1])},"
                f"{_num(s.t1)},{_num(s.p1[0])},{_num(s.p1[1])},{int(s.online)}\n"
            )


def parse_movement(stream: Iterable[str], arena: Arena | None = None) -> MovementTrace:
    """Read ``movement.csv``.

    Node ids must be dense from 0. The span runs to the latest segment end.
    Without an explicit ``arena`` the bounding box of all points is used.
    """
    per_node: dict[int, list[Segment]] = {}
    lines = iter(stream)
    header_seen = False
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split(",")
        if not header_seen:
            if tuple(fields) != MOVEMENT_HEADER:
                raise ParseError(line_no, None, f"expected header {','.join(MOVEMENT_HEADER)!r}")
            header_seen = True
            continue
        if len(fields) != len(MOVEMENT_HEADER):
            raise ParseError(line_no, None, f"expected {len(MOVEMENT_HEADER)} fields, got {len(fields)}")
        try:
            node = int(fields[0])
        except ValueError:
            raise ParseError(line_no, "node", f"not an integer: {fields[0]!r}") from None
        vals = []
        for name, text in zip(MOVEMENT_HEADER[1:7], fields[1:7]):
            try:
                vals.append(float(text))
            except ValueError:
                raise ParseError(line_no, name, f"not a number: {text!r}") from None
        if fields[7] not in ("0", "1"):
            raise ParseError(line_no, "online", f"expected 0 or 1, got {fields[7]!r}")
        t0, x0, y0, t1, x1, y1 = vals
        if not t0 < t1:
            raise ParseError(line_no, "t1", "segment must have t0 < t1")
        segs = per_node.setdefault(node, [])
        if segs and segs[-1].t1 != t0:
            raise ParseError(line_no, "t0", f"node {node} segments are not contiguous")
        segs.append(Segment(t0, t1, (x0, y0), (x1, y1), fields[7] == "1"))
    if not header_seen:
        raise ParseError(1, None, "missing header")
    n = max(per_node) + 1 if per_node else 0
    if set(per_node) != set(range(n)):
        raise ValidationError("movement node ids must be dense from 0")
    segments = tuple(tuple(per_node[i]) for i in range(n))
    duration = max((s[-1].t1 for s in segments), default=0.0)
    if arena is None:
        xs = [c for segs in segments for s in segs for c in (s.p0[0], s.p1[0])]
        ys = [c for segs in segments for s in segs for c in (s.p0[1], s.p1[1])]
        arena = Arena(max(xs, default=1.0) or 1.0, max(ys, default=1.0) or 1.0)
    initial = tuple(segs[0].p0 for segs in segments)
    return MovementTrace(arena, duration, initial, segments)


class ConfigError(ValueError):
    """Configuration problem; ``key`` is the dotted path of the offending key."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class _Cfg:
    """Dotted-path accessor over a parsed YAML mapping."""

    def __init__(self, data: Any, path: str = ""):
        self.data = data
        self.path = path

    def _key(self, name: str) -> str:
        return f"{self.path}.{name}" if self.path else name

    def has(self, name: str) -> bool:
        return isinstance(self.data, dict) and name in self.data

    def get(self, name: str) -> Any:
        if not isinstance(self.data, dict) or name not in self.data:
            raise ConfigError(self._key(name), "missing required key")
        return self.data[name]

    def sub(self, name: str) -> _Cfg:
        return _Cfg(self.get(name), self._key(name))

    def items(self, name: str) -> list[_Cfg]:
        val = self.get(name)
        if not isinstance(val, list):
            raise ConfigError(self._key(name), "expected a list")
        return [_Cfg(v, f"{self._key(name)}[{i}]") for i, v in enumerate(val)]

    def number(self, name: str, kind=float):
        val = self.get(name)
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(self._key(name), f"expected a number, got {val!r}")
        if kind is int and not float(val).is_integer():
            raise ConfigError(self._key(name), f"expected an integer, got {val!r}")
        return kind(val)

    def pair(self, name: str) -> tuple[float, float]:
        val = self.get(name)
        if not (isinstance(val, list) and len(val) == 2 and all(isinstance(v, (int, float)) for v in val)):
            raise ConfigError(self._key(name), f"expected [min, max], got {val!r}")
        return (float(val[0]), float(val[1]))

    def mapping(self, name: str) -> dict:
        val = self.get(name)
        if not isinstance(val, dict):
            raise ConfigError(self._key(name), "expected a mapping")
        return val


def _arena(c: _Cfg) -> Arena:
    a = c.sub("arena")
    return Arena(a.number("width"), a.number("height"))


def _rd(c: _Cfg, seed: int) -> RdConfig:
    onoff = None
    if c.has("onoff") and c.get("onoff") is not None:
        o = c.sub("onoff")
        onoff = OnOff(o.pair("on_range"), o.pair("off_range"))
    return RdConfig(
        arena=_arena(c),
        n_nodes=c.number("n_nodes", int),
        duration=c.number("duration", int),
        speed_range=c.pair("speed_range"),
        pause_range=c.pair("pause_range"),
        seed=seed,
        onoff=onoff,
    )


def _tvc(c: _Cfg, seed: int) -> TvcConfig:
    s = c.sub("schedule")
    schedule = TimePeriodSchedule(
        s.number("cycle_length", int),
        tuple(Period(p.number("offset", int), p.number("length", int), str(p.get("label"))) for p in s.items("periods")),
    )
    communities = []
    for cc in c.items("communities"):
        b = cc.get("bounds")
        if not (isinstance(b, list) and len(b) == 4):
            raise ConfigError(f"{cc.path}.bounds", "expected [x0, y0, x1, y1]")
        communities.append(Community(str(cc.get("id")), Rect(*map(float, b))))
    groups = []
    for g in c.items("groups"):
        probs = {str(k): {str(t): float(p) for t, p in v.items()} for k, v in g.mapping("probs").items()}
        groups.append(NodeGroup(str(g.get("name")), g.number("size", int), probs))
    return TvcConfig(
        arena=_arena(c),
        n_nodes=c.number("n_nodes", int),
        duration=c.number("duration", int),
        schedule=schedule,
        communities=tuple(communities),
        groups=tuple(groups),
        epoch_duration_range=c.pair("epoch_duration_range"),
        speed_range=c.pair("speed_range"),
        pause_range=c.pair("pause_range"),
        online_prob={str(k): float(v) for k, v in c.mapping("online_prob").items()},
        seed=seed,
    )


def resolve_config_path(name: str | Path) -> Path:
    """Find a config file, falling back to the configs bundled with the package.

    ``examples/infocom-tvc`` and ``infocom-tvc`` both resolve to the bundled
    ``infocom-tvc.yaml`` when no such file exists on disk.
    """
    p = Path(name)
    if p.is_file():
        return p
    for cand in (CONFIG_DIR / p.name, CONFIG_DIR / f"{p.name}.yaml"):
        if cand.is_file():
            return cand
    raise FileNotFoundError(f"config not found: {name}")


def build_config(data: dict, model: str, seed: int) -> RdConfig | TvcConfig:
    c = _Cfg(data)
    declared = data.get("model") if isinstance(data, dict) else None
    if declared is not None and declared != model:
        raise ConfigError("model", f"config is for model {declared!r}, not {model!r}")
    try:
        if model == "rd":
            return _rd(c, seed)
        if model == "tvc":
            return _tvc(c, seed)
    except ValidationError as exc:
        raise ConfigError(c.path or "config", str(exc)) from exc
    raise ConfigError("model", f"unknown model {model!r}")


def load_config(path: str | Path, model: str, seed: int) -> RdConfig | TvcConfig:
    with open(resolve_config_path(path)) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a mapping")
    return build_config(data, model, seed)
