"""Bidder specifications, bid contexts and replayed bid traces."""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from app.schemas.attribution import AttributionModel, SchemeKind
from app.schemas.conversion import LinearConversionModel
from app.schemas.records import ImpressionRecord


class BidderKind(str, Enum):
    """Bidding policies compared by the simulator."""

    LCB = "LCB"
    FCB = "FCB"
    AB = "AB"
    MULTIPLIER = "MultiplierPolicy"

    @property
    def training_scheme(self) -> SchemeKind:
        """Labeling scheme the bidder's conversion model is trained with."""
        return {
            BidderKind.LCB: SchemeKind.LAST_CLICK,
            BidderKind.FCB: SchemeKind.FIRST_CLICK,
            BidderKind.AB: SchemeKind.ALL_CLICKS,
            BidderKind.MULTIPLIER: SchemeKind.LAST_CLICK,
        }[self]

    @property
    def needs_attribution_model(self) -> bool:
        return self in (BidderKind.AB, BidderKind.MULTIPLIER)


@dataclass(frozen=True, slots=True)
class BidContext:
    """One auction as the bidder sees it."""

    record: ImpressionRecord
    delta_c: Optional[float]
    cpa: float

    def __post_init__(self) -> None:
        if self.delta_c is not None and self.delta_c < 0:
            raise ValueError("delta_c must be non-negative")

    @classmethod
    def from_record(cls, record: ImpressionRecord, delta_c: Optional[float]) -> "BidContext":
        return cls(record=record, delta_c=delta_c, cpa=record.cpo)


@dataclass(frozen=True)
class BidderSpec:
    """A bidding policy with the models it needs."""

    kind: BidderKind
    conversion_model: LinearConversionModel
    attribution_model: Optional[AttributionModel] = None
    multiplier_a: float = 1.0
    multiplier_b: float = 1.0
    recency_feature: bool = True

    def __post_init__(self) -> None:
        if (self.attribution_model is not None) != self.kind.needs_attribution_model:
            raise ValueError(f"{self.kind.value} {'requires' if self.kind.needs_attribution_model else 'takes no'} attribution model")
        if self.multiplier_a <= 0:
            raise ValueError("multiplier A must be positive")
        if not 0.0 <= self.multiplier_b <= 1.0:
            raise ValueError("multiplier B must lie in [0, 1]")


@dataclass(frozen=True)
class BidTrace:
    """Bids of one bidder over an ordered record set (NaN delta_c means no prior click)."""

    bidder: BidderKind
    record_ids: np.ndarray
    delta_c: np.ndarray
    predictions: np.ndarray
    bids: np.ndarray

    def __len__(self) -> int:
        return int(self.bids.shape[0])
