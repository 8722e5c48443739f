"""Log-level domain types: impressions, timelines, conversions and attribution samples.

Records are kept as slotted frozen dataclasses rather than pydantic models: a
30-day log holds millions of them and they are validated once, at load or
generation time.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

DAY_SECONDS = 86400

Feature = Tuple[int, str]
TimelineKey = Tuple[str, str]


@dataclass(frozen=True, slots=True)
class ImpressionRecord:
    """One logged display with its cost, outcomes and categorical context."""

    record_id: int
    timestamp: int
    user_id: str
    campaign_id: str
    cost: float
    cpo: float
    features: Tuple[Feature, ...] = ()
    click: bool = False
    conversion: bool = False
    attribution: bool = False
    click_pos: Optional[int] = None
    click_nb: Optional[int] = None
    conversion_timestamp: Optional[int] = None
    conversion_value: Optional[float] = None

    def __post_init__(self) -> None:
        if self.timestamp < 0:
            raise ValueError("timestamp must be non-negative")
        if self.cost < 0 or self.cpo < 0:
            raise ValueError("cost and cpo must be non-negative")
        if self.attribution and not self.conversion:
            raise ValueError("attribution=1 requires conversion=1")
        if self.click_pos is not None:
            if self.click_pos < 0:
                raise ValueError("click_pos must be non-negative")
            if not (self.click and self.conversion):
                raise ValueError("click_pos requires click=1 and conversion=1")
        if self.click_nb is not None:
            if self.click_pos is None or self.click_pos >= self.click_nb:
                raise ValueError("click_nb requires click_pos < click_nb")
        if (self.conversion_timestamp is not None) != self.conversion:
            raise ValueError("conversion_timestamp must be present exactly when conversion=1")
        if self.conversion_timestamp is not None and self.conversion_timestamp < self.timestamp:
            raise ValueError("conversion_timestamp precedes the impression")
        if self.conversion_value is not None and self.conversion_value < 0:
            raise ValueError("conversion_value must be non-negative")

    @property
    def key(self) -> TimelineKey:
        return (self.user_id, self.campaign_id)

    @property
    def day(self) -> int:
        return self.timestamp // DAY_SECONDS

    @property
    def is_raw_last_click(self) -> bool:
        """Whether the logged flags mark this display as the attributed last click."""
        return (
            self.attribution
            and self.click
            and self.click_pos is not None
            and self.click_nb is not None
            and self.click_pos == self.click_nb - 1
        )


@dataclass(frozen=True, slots=True)
class UserTimeline:
    """Time-ordered events of one (user, campaign)."""

    key: TimelineKey
    events: Tuple[ImpressionRecord, ...]
    click_times: Tuple[int, ...]


@dataclass(frozen=True, slots=True)
class ConversionGroup:
    """A logged conversion and the platform clicks credited with leading to it."""

    key: TimelineKey
    conversion_timestamp: int
    attributed: bool
    clicks: Tuple[ImpressionRecord, ...] = field(default=())

    @property
    def click_times(self) -> List[int]:
        return [c.timestamp for c in self.clicks]

    @property
    def day(self) -> int:
        return self.conversion_timestamp // DAY_SECONDS


class AttributionSample(BaseModel):
    """Delay between a conversion and the last platform click before it, with its attribution label."""

    delta: float = Field(..., gt=0, description="Seconds between the last click and the conversion")
    attributed: bool = Field(..., description="Whether the conversion was credited to the platform")
    campaign_id: str = Field("", description="Campaign the conversion belongs to")
    day: int = Field(0, description="Conversion day index (timestamp // 86400)")


class AttributionSampleSet(BaseModel):
    """Samples extracted from a log plus extraction diagnostics."""

    samples: List[AttributionSample] = Field(default_factory=list)
    skipped_non_positive: int = Field(0, description="Conversions skipped because delta <= 0 (clock skew)")
    conversions_without_click: int = Field(0, description="Conversions with no click inside the window")


@dataclass(frozen=True, slots=True)
class LabeledClick:
    """Training example built from one clicked record: context features and its credit under a scheme."""

    record: ImpressionRecord
    features: Tuple[Feature, ...]
    weight: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError("weight must lie in [0, 1]")

    @property
    def label(self) -> bool:
        return self.weight > 0
