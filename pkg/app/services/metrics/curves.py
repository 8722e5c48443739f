"""Bucketed attribution-rate curves."""
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np
import pandas as pd

from app.schemas.attribution import AttributionScheme, SchemeKind
from app.schemas.records import TimelineKey, UserTimeline
from app.services.data.timelines import ConversionIndex, extract_attribution_samples, time_since_last_click
from app.services.labeling.training_set import build_training_set


@dataclass(frozen=True)
class AttributionCurves:
    conversions: pd.DataFrame
    displays: pd.DataFrame


def _bucket(values: np.ndarray, width: int) -> np.ndarray:
    return (values // width * width).astype(np.int64)


def conversion_attribution_curve(
    timelines: Mapping[TimelineKey, UserTimeline], bucket_width: int, window: Optional[int] = None
) -> pd.DataFrame:
    """Mean attribution of conversions per bucket of delay since the last click."""
    samples = extract_attribution_samples(timelines, window).samples
    frame = pd.DataFrame(
        {
            "bucket_start": _bucket(np.array([s.delta for s in samples], dtype=float), bucket_width),
            "attributed": np.array([s.attributed for s in samples], dtype=float),
        }
    )
    return (
        frame.groupby("bucket_start", sort=True)["attributed"]
        .agg(attribution_rate="mean", n="size")
        .reset_index()
    )


def display_label_curves(
    timelines: Mapping[TimelineKey, UserTimeline],
    bucket_width: int,
    index: Optional[ConversionIndex] = None,
    window: Optional[int] = None,
) -> pd.DataFrame:
    """Positive-label rate of clicked displays per delta_c bucket under last-click and first-click labeling."""
    index = index or ConversionIndex(timelines, window)
    records = [r for timeline in timelines.values() for r in timeline.events if r.click]
    delta_c = np.full(len(records), np.nan)
    for i, record in enumerate(records):
        delta = time_since_last_click(timelines[record.key], record.timestamp)
        if delta is not None:
            delta_c[i] = delta
    present = ~np.isnan(delta_c)
    frames = []
    for kind in (SchemeKind.LAST_CLICK, SchemeKind.FIRST_CLICK):
        examples = build_training_set(records, timelines, AttributionScheme(kind=kind), index=index, recency=False)
        labels = np.array([e.label for e in examples], dtype=float)
        frame = pd.DataFrame({"bucket_start": _bucket(delta_c[present], bucket_width), "label": labels[present]})
        curve = frame.groupby("bucket_start", sort=True)["label"].agg(positive_rate="mean", n="size").reset_index()
        curve.insert(0, "scheme", kind.value)
        frames.append(curve)
    return pd.concat(frames, ignore_index=True)


def attribution_rate_curves(
    timelines: Mapping[TimelineKey, UserTimeline],
    bucket_width: int,
    index: Optional[ConversionIndex] = None,
    window: Optional[int] = None,
) -> AttributionCurves:
    return AttributionCurves(
        conversions=conversion_attribution_curve(timelines, bucket_width, window),
        displays=display_label_curves(timelines, bucket_width, index, window),
    )
