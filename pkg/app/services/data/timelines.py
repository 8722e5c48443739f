"""Per-(user, campaign) timelines, conversion grouping and attribution-sample extraction."""
import bisect
import logging
from collections import defaultdict
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from app.core.config import settings
from app.schemas.records import (
    AttributionSample,
    AttributionSampleSet,
    ConversionGroup,
    ImpressionRecord,
    TimelineKey,
    UserTimeline,
)

logger = logging.getLogger(__name__)

Timelines = Dict[TimelineKey, UserTimeline]


def build_timelines(records: Iterable[ImpressionRecord]) -> Timelines:
    """Group records by (user_id, campaign_id), each timeline ordered by timestamp (stable on ties)."""
    grouped: Dict[TimelineKey, List[ImpressionRecord]] = defaultdict(list)
    for record in records:
        grouped[record.key].append(record)

    timelines: Timelines = {}
    for key in sorted(grouped):
        events = sorted(grouped[key], key=lambda r: r.timestamp)
        click_times = tuple(r.timestamp for r in events if r.click)
        timelines[key] = UserTimeline(key=key, events=tuple(events), click_times=click_times)
    return timelines


def time_since_last_click(timeline: UserTimeline, t: int) -> Optional[int]:
    """Seconds since the latest click strictly before ``t``; None when no click precedes ``t``."""
    position = bisect.bisect_left(timeline.click_times, t)
    if position == 0:
        return None
    return t - timeline.click_times[position - 1]


def group_conversions(timeline: UserTimeline, window: Optional[int] = None) -> List[ConversionGroup]:
    """Group clicked records by the conversion logged on them, dropping clicks older than ``window`` seconds."""
    window = settings.attribution_window_seconds if window is None else window
    by_conversion: Dict[int, List[ImpressionRecord]] = defaultdict(list)
    attributed: Dict[int, bool] = {}
    for record in timeline.events:
        if not record.conversion or record.conversion_timestamp is None:
            continue
        ts = record.conversion_timestamp
        attributed[ts] = attributed.get(ts, False) or record.attribution
        if record.click and ts - record.timestamp <= window:
            by_conversion[ts].append(record)

    return [
        ConversionGroup(
            key=timeline.key,
            conversion_timestamp=ts,
            attributed=attributed[ts],
            clicks=tuple(by_conversion.get(ts, ())),
        )
        for ts in sorted(attributed)
    ]


class ConversionIndex:
    """Conversion groups of every timeline, addressable by the clicked records they contain."""

    def __init__(self, timelines: Mapping[TimelineKey, UserTimeline], window: Optional[int] = None) -> None:
        self.groups: List[ConversionGroup] = []
        self._by_record: Dict[int, Tuple[ConversionGroup, int]] = {}
        for timeline in timelines.values():
            for group in group_conversions(timeline, window):
                self.groups.append(group)
                for position, click in enumerate(group.clicks):
                    self._by_record[id(click)] = (group, position)

    def lookup(self, record: ImpressionRecord) -> Optional[Tuple[ConversionGroup, int]]:
        """Conversion group of a clicked record and the record's position among its clicks."""
        return self._by_record.get(id(record))


def extract_attribution_samples(
    timelines: Mapping[TimelineKey, UserTimeline], window: Optional[int] = None
) -> AttributionSampleSet:
    """One (delay since last click, attributed) sample per conversion preceded by a click.

    Non-positive delays (clock skew) are skipped and tallied.
    """
    result = AttributionSampleSet()
    for timeline in timelines.values():
        for group in group_conversions(timeline, window):
            if not group.clicks:
                result.conversions_without_click += 1
                continue
            delta = group.conversion_timestamp - group.clicks[-1].timestamp
            if delta <= 0:
                result.skipped_non_positive += 1
                continue
            result.samples.append(
                AttributionSample(
                    delta=delta,
                    attributed=group.attributed,
                    campaign_id=timeline.key[1],
                    day=group.day,
                )
            )

    if result.skipped_non_positive:
        logger.warning(f"Skipped {result.skipped_non_positive} conversions with non-positive delay")
    logger.info(
        f"Extracted {len(result.samples)} attribution samples "
        f"({result.conversions_without_click} conversions without a click in window)"
    )
    return result
