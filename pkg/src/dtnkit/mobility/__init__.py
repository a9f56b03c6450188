"""Synthetic mobility: Random Direction and Time-Variant Community models."""

from .io import ConfigError, build_config, load_config, parse_movement, resolve_config_path, write_movement
from .model import (
    ROAM,
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
from .proximity import (
    movement_to_contacts,
    movement_to_sessions,
    occupancy_grid,
    trace_location_occupancy,
)
from .synth import synthesize_rd, synthesize_tvc, travel_to_boundary

__all__ = [
    "ROAM",
    "Arena",
    "Community",
    "ConfigError",
    "MovementTrace",
    "NodeGroup",
    "OnOff",
    "Period",
    "RdConfig",
    "Rect",
    "Segment",
    "TimePeriodSchedule",
    "TvcConfig",
    "build_config",
    "load_config",
    "movement_to_contacts",
    "movement_to_sessions",
    "occupancy_grid",
    "parse_movement",
    "resolve_config_path",
    "synthesize_rd",
    "synthesize_tvc",
    "trace_location_occupancy",
    "travel_to_boundary",
    "write_movement",
]
