"""Command-line pipeline: synth -> contacts -> stats -> route -> report.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import epidemic, stats
from .core import ValidationError
from .mobility import (
    ConfigError,
    TvcConfig,
    load_config,
    movement_to_contacts,
    movement_to_sessions,
    parse_movement,
    synthesize_rd,
    synthesize_tvc,
    write_movement,
)
from .traceio import (
    ParseError,
    parse_contacts,
    parse_node_map,
    parse_sessions,
    sessions_to_encounters,
    write_contacts,
    write_node_map,
    write_sessions,
)

log = logging.getLogger("dtnkit")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _require_files(*paths):
    for p in paths:
        if p is not None and not Path(p).is_file():
            raise UsageError(f"input file not found: {p}")


def _open_out(path: str):
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    return open(p, "w", newline="\n")


def cmd_synth(args) -> int:
    if args.seed is None:
        raise UsageError("--seed is required for synthesis")
    try:
        config = load_config(args.config, args.model, args.seed)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    trace = synthesize_rd(config) if args.model == "rd" else synthesize_tvc(config)
    with _open_out(args.out) as fh:
        write_movement(trace, fh)
    print(f"nodes={trace.n_nodes} duration={trace.duration} segments={trace.segment_count}")
    return EXIT_OK


def cmd_contacts(args) -> int:
    _require_files(args.input)
    skipped: list | None = [] if args.skip_invalid else None
    map_path = args.map or str(Path(args.out).with_name("nodes.map"))
    if args.mode == "from-sessions":
        with open(args.input) as fh:
            sessions, ids = parse_sessions(fh, skipped=skipped)
        trace = sessions_to_encounters(sessions)
    else:
        if args.range is None:
            raise UsageError("from-movement requires --range")
        with open(args.input) as fh:
            movement = parse_movement(fh)
        trace = movement_to_contacts(movement, args.range, args.step)
        ids = {str(n): n for n in range(movement.n_nodes)}
    with _open_out(args.out) as fh:
        write_contacts(trace, fh)
    with _open_out(map_path) as fh:
        write_node_map(ids, fh)
    if skipped:
        log.warning("skipped %d invalid rows", len(skipped))
    print(f"encounters={len(trace.records)} nodes={len(trace.nodes)}")
    return EXIT_OK


def cmd_sessions(args) -> int:
    _require_files(args.movement)
    try:
        config = load_config(args.config, "tvc", 0)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    assert isinstance(config, TvcConfig)
    with open(args.movement) as fh:
        movement = parse_movement(fh, arena=config.arena)
    sessions = movement_to_sessions(movement, config.communities, args.step)
    with _open_out(args.out) as fh:
        write_sessions(sessions, fh)
    print(f"sessions={len(sessions)} nodes={len({s.node for s in sessions})}")
    return EXIT_OK


def _read_contacts(path: str, nodes_map: str | None = None):
    nodes = ()
    if nodes_map is not None:
        with open(nodes_map) as fh:
            nodes = parse_node_map(fh).values()
    with open(path) as fh:
        return parse_contacts(fh, nodes=nodes)


def _skip_write(payload, out):
    pass


def cmd_stats(args) -> int:
    _require_files(args.input)
    kind = args.kind
    if kind == "reappearance" and args.max_gap % args.bin:
        raise UsageError("--max-gap must be a multiple of --bin")
    # compute before opening the output, so failures leave no partial file
    if kind in ("intermeeting", "duration", "tailfit"):
        trace = _read_contacts(args.input)
        of = kind if kind != "tailfit" else args.of
        samples = stats.inter_meeting_times(trace)[0] if of == "intermeeting" else stats.meeting_durations(trace)
        n = len(samples)
        if kind == "tailfit":
            writer, payload = (stats.write_tailfit, stats.tail_fit(samples, args.head_quantile)) if n else (_skip_write, None)
        else:
            writer, payload = stats.write_cdf, stats.empirical_cdf(samples) if n else None
        if n == 0:
            log.warning("no samples; wrote %s", "empty file" if kind == "tailfit" else "header only")
    else:
        with open(args.input) as fh:
            sessions, _ = parse_sessions(fh)
        n = len(sessions)
        if n == 0:
            log.warning("no sessions; wrote header only")
        if kind == "location-pref":
            writer, payload = stats.write_preference, stats.location_preference(sessions)
        else:
            curve = stats.reappearance_probability(sessions, args.bin, args.max_gap) if n else stats.ReappearanceCurve(())
            writer, payload = stats.write_reappearance, curve
    with _open_out(args.out) as out:
        writer(payload, out)
    print(f"samples={n}")
    return EXIT_OK


def cmd_route(args) -> int:
    _require_files(args.contacts, args.nodes)
    trace = _read_contacts(args.contacts, args.nodes)
    workload = epidemic.Workload.one_per_node(trace, args.t_create)
    report = epidemic.run_epidemic(trace, workload)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = args.name or Path(args.contacts).stem
    with _open_out(out_dir / "deliveries.csv") as fh:
        epidemic.write_deliveries(report, fh)
    with _open_out(out_dir / "report.csv") as fh:
        epidemic.write_report(report, fh)
    with _open_out(out_dir / "summary.csv") as fh:
        comparison = epidemic.summarize([epidemic.summarize_report(name, report)], deviations=False)
        epidemic.write_summary(comparison, fh)
    print(
        f"messages={report.n_messages} deliveries={len(report.deliveries)} "
        f"transmissions={report.total_transmissions} overhead={report.overhead:.6g}"
    )
    return EXIT_OK


def cmd_report(args) -> int:
    _require_files(*args.summaries)
    summaries = []
    for path in args.summaries:
        with open(path) as fh:
            summaries.extend(epidemic.read_summaries(fh))
    names = [s.name for s in summaries]
    if args.reference is not None and args.reference not in names:
        raise UsageError(f"unknown reference {args.reference!r}; traces are {names}")
    try:
        comparison = epidemic.summarize(summaries, args.reference, deviations=args.reference is not None)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    with _open_out(args.out) as fh:
        epidemic.write_summary(comparison, fh)
    if args.table:
        with _open_out(args.table) as fh:
            epidemic.write_table(comparison, fh)
    print(epidemic.format_table(comparison))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dtnkit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize a movement trace")
    s.add_argument("model", choices=["rd", "tvc"])
    s.add_argument("--config", required=True, help="YAML model config, or a bundled name such as examples/infocom-tvc")
    s.add_argument("--seed", type=int, help="64-bit unsigned seed (required)")
    s.add_argument("--out", default="movement.csv")
    s.set_defaults(func=cmd_synth)

    c = sub.add_parser("contacts", help="build contacts.csv from sessions or movement")
    c.add_argument("mode", choices=["from-sessions", "from-movement"])
    c.add_argument("input")
    c.add_argument("--range", type=float, help="radio range in grid units (from-movement)")
    c.add_argument("--step", type=int, default=1, help="sampling step in seconds (from-movement)")
    c.add_argument("--out", default="contacts.csv")
    c.add_argument("--map", help="node map output path (default: nodes.map next to --out)")
    c.add_argument("--skip-invalid", action="store_true", help="warn about and skip malformed rows")
    c.set_defaults(func=cmd_contacts)

    ss = sub.add_parser("sessions", help="community presence sessions from a TVC movement trace")
    ss.add_argument("movement")
    ss.add_argument("--config", required=True, help="TVC config providing the communities")
    ss.add_argument("--step", type=int, default=60)
    ss.add_argument("--out", default="sessions.csv")
    ss.set_defaults(func=cmd_sessions)

    st = sub.add_parser("stats", help="encounter and spatio-temporal statistics")
    st.add_argument("kind", choices=["intermeeting", "duration", "location-pref", "reappearance", "tailfit"])
    st.add_argument("input")
    st.add_argument("--out", required=True)
    st.add_argument("--bin", type=int, default=stats.HOUR)
    st.add_argument("--max-gap", type=int, default=7 * stats.DAY)
    st.add_argument("--head-quantile", type=float, default=0.9)
    st.add_argument("--of", choices=["intermeeting", "duration"], default="intermeeting", help="sample for tailfit")
    st.set_defaults(func=cmd_stats)

    r = sub.add_parser("route", help="run epidemic routing over contacts.csv")
    r.add_argument("contacts")
    r.add_argument("--out-dir", required=True)
    r.add_argument("--nodes", help="nodes.map listing every node, including ones without contacts")
    r.add_argument("--name", help="trace name used in summary.csv (default: contacts file stem)")
    r.add_argument("--t-create", type=int, help="message creation time (default: first contact start)")
    r.set_defaults(func=cmd_route)

    rp = sub.add_parser("report", help="merge summaries into one comparison table")
    rp.add_argument("summaries", nargs="+")
    rp.add_argument("--reference", help="trace name deviations are measured against")
    rp.add_argument("--out", default="summary.csv")
    rp.add_argument("--table", help="also write the wide metric x trace table here")
    rp.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
