"""Vectorized replay of logged auctions under a bidder, plus bid-trace export and bid profiles."""
import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy import sparse

from app.core.exceptions import CalibrationError
from app.schemas.bidding import BidderKind, BidderSpec, BidTrace
from app.schemas.conversion import LinearConversionModel
from app.schemas.records import ImpressionRecord, TimelineKey, UserTimeline
from app.services.attribution.model import marginal_contributions
from app.services.conversion.hashing import context_features, hash_matrix
from app.services.conversion.prediction import calibrate, predict_batch
from app.services.data.timelines import time_since_last_click

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReplayDesign:
    """Auction-side inputs of a record set, computed once and shared by every bidder."""

    record_ids: np.ndarray
    cpa: np.ndarray
    cost: np.ndarray
    delta_c: np.ndarray
    X: sparse.csr_matrix

    def __len__(self) -> int:
        return int(self.record_ids.shape[0])


def delta_c_array(records: Sequence[ImpressionRecord], timelines: Mapping[TimelineKey, UserTimeline]) -> np.ndarray:
    """Time since the last click strictly before each record; NaN when there is none."""
    out = np.full(len(records), np.nan)
    for i, record in enumerate(records):
        delta = time_since_last_click(timelines[record.key], record.timestamp)
        if delta is not None:
            out[i] = delta
    return out


def build_design(
    records: Sequence[ImpressionRecord],
    timelines: Mapping[TimelineKey, UserTimeline],
    bits: int,
    recency: bool = True,
) -> ReplayDesign:
    delta_c = delta_c_array(records, timelines)
    features = [
        context_features(r, None if np.isnan(d) else float(d), recency) for r, d in zip(records, delta_c)
    ]
    return ReplayDesign(
        record_ids=np.fromiter((r.record_id for r in records), dtype=np.int64, count=len(records)),
        cpa=np.fromiter((r.cpo for r in records), dtype=float, count=len(records)),
        cost=np.fromiter((r.cost for r in records), dtype=float, count=len(records)),
        delta_c=delta_c,
        X=hash_matrix(features, bits),
    )


def multiplier_factors(decay_rate: float, delta_c: np.ndarray, a: float, b: float) -> np.ndarray:
    """A * (1 - B * exp(-lambda * delta_c)); NaN delta_c gives A."""
    if a == 1.0 and b == 1.0:
        return marginal_contributions(decay_rate, delta_c)
    out = np.full(delta_c.shape, a, dtype=float)
    present = ~np.isnan(delta_c)
    out[present] = a * (1.0 - b * np.exp(-decay_rate * delta_c[present]))
    return out


def bid_vector(spec: BidderSpec, design: ReplayDesign) -> np.ndarray:
    """Bids of ``spec`` on every auction of ``design``."""
    predictions = predict_batch(spec.conversion_model, design.X)
    bids = design.cpa * predictions
    if spec.kind == BidderKind.AB:
        bids = bids * marginal_contributions(spec.attribution_model.decay_rate, design.delta_c)
    elif spec.kind == BidderKind.MULTIPLIER:
        bids = bids * multiplier_factors(
            spec.attribution_model.decay_rate, design.delta_c, spec.multiplier_a, spec.multiplier_b
        )
    return bids


def replay(spec: BidderSpec, design: ReplayDesign) -> BidTrace:
    predictions = predict_batch(spec.conversion_model, design.X)
    return BidTrace(
        bidder=spec.kind,
        record_ids=design.record_ids,
        delta_c=design.delta_c,
        predictions=predictions,
        bids=bid_vector(spec, design),
    )


def replay_records(
    records: Sequence[ImpressionRecord],
    timelines: Mapping[TimelineKey, UserTimeline],
    spec: BidderSpec,
) -> BidTrace:
    """Replay ``spec`` on ``records``, delta_c taken from ``timelines``."""
    return replay(spec, build_design(records, timelines, spec.conversion_model.bits, spec.recency_feature))


def calibrate_bidder(spec: BidderSpec, design: ReplayDesign, reference_total: float) -> BidderSpec:
    """Recalibrate the bidder's conversion model so its bids on ``design`` sum to ``reference_total``."""

    def bids(model: LinearConversionModel, d: ReplayDesign) -> np.ndarray:
        return bid_vector(dataclasses.replace(spec, conversion_model=model), d)

    model = calibrate(spec.conversion_model, bids, design, reference_total)
    return dataclasses.replace(spec, conversion_model=model)


def equalize_multiplier(
    reference_bids: np.ndarray,
    delta_c: np.ndarray,
    decay_rate: float,
    b: float,
    reference_total: Optional[float] = None,
) -> float:
    """A at which the multiplier policy spends ``reference_total`` (default: the reference bids' total)."""
    reference_total = float(np.sum(reference_bids)) if reference_total is None else reference_total
    shaped = float(np.sum(reference_bids * multiplier_factors(decay_rate, delta_c, 1.0, b)))
    if shaped <= 0:
        raise CalibrationError("multiplier policy places no positive bid, cannot equalize spend")
    a = reference_total / shaped
    logger.info(f"Multiplier A={a:.6g} equalizes spend at B={b:g}")
    return a


def write_bid_trace(trace: BidTrace, path: Union[str, Path], delimiter: str = "\t") -> Path:
    """TSV of record id, bidder, delta_c (empty when no prior click), prediction and bid."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        {
            "record_id": trace.record_ids,
            "bidder": trace.bidder.value,
            "delta_c": trace.delta_c,
            "prediction": trace.predictions,
            "bid": trace.bids,
        }
    )
    frame.to_csv(path, sep=delimiter, index=False, na_rep="")
    return path


def profile_from_trace(trace: BidTrace, bucket_width: int, horizon: int) -> pd.DataFrame:
    """Mean bid per delta_c bucket over the first ``horizon`` seconds after a click; empty buckets omitted."""
    present = ~np.isnan(trace.delta_c) & (trace.delta_c < horizon)
    frame = pd.DataFrame(
        {
            "bucket_start": (trace.delta_c[present] // bucket_width * bucket_width).astype(np.int64),
            "bid": trace.bids[present],
        }
    )
    profile = frame.groupby("bucket_start", sort=True)["bid"].agg(mean_bid="mean", n="size").reset_index()
    profile.insert(0, "bidder", trace.bidder.value)
    return profile


def bid_profile(
    records: Sequence[ImpressionRecord],
    timelines: Mapping[TimelineKey, UserTimeline],
    spec: BidderSpec,
    bucket_width: int = 3600,
    horizon: int = 86400,
) -> pd.DataFrame:
    return profile_from_trace(replay_records(records, timelines, spec), bucket_width, horizon)
