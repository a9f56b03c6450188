"""Trace-driven toolkit for delay tolerant network studies.

Parses WLAN session and Bluetooth contact traces, synthesizes mobility
(Random Direction, on/off Random Direction, Time-Variant Community),
computes encounter statistics and runs epidemic routing over any of them.
"""

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
from .epidemic import Message, RoutingReport, Workload, run_epidemic, summarize
from .traceio import ParseError, parse_contacts, parse_sessions, sessions_to_encounters

__version__ = "0.1.0"

__all__ = [
    "ContactTrace",
    "EncounterRecord",
    "Message",
    "ParseError",
    "RoutingReport",
    "SessionRecord",
    "TimeInterval",
    "ValidationError",
    "Workload",
    "encounter",
    "interval_intersection",
    "merge_pair_intervals",
    "parse_contacts",
    "parse_sessions",
    "run_epidemic",
    "sessions_to_encounters",
    "summarize",
]
