"""Log schema, loading, timelines, sliding splits and synthetic worlds.

Usage:
    from app.services.data import load_log, build_timelines, time_since_last_click

    records = load_log("train.tsv")
    timelines = build_timelines(records)
    delta_c = time_since_last_click(timelines[records[0].key], records[0].timestamp)
"""

from .log_io import load_log, write_log
from .splits import SplitPair, sliding_split
from .synthetic import generate_synthetic_log
from .timelines import (
    ConversionIndex,
    Timelines,
    build_timelines,
    extract_attribution_samples,
    group_conversions,
    time_since_last_click,
)

__all__ = [
    "ConversionIndex",
    "SplitPair",
    "Timelines",
    "build_timelines",
    "extract_attribution_samples",
    "generate_synthetic_log",
    "group_conversions",
    "load_log",
    "sliding_split",
    "time_since_last_click",
    "write_log",
]
