"""Per-advertiser and per-day attribution fits around a global one."""
import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence

from pydantic import BaseModel, Field

from app.core.config import settings
from app.core.exceptions import InsufficientDataError
from app.schemas.attribution import AttributionModel
from app.schemas.records import AttributionSample
from app.services.attribution.model import fit_lambda

logger = logging.getLogger(__name__)


class AdvertiserFits(BaseModel):
    """Per-campaign models, key-ordered, plus the campaigns left out for lack of samples."""

    models: Dict[str, AttributionModel] = Field(default_factory=dict)
    omitted: Dict[str, int] = Field(default_factory=dict, description="Sample count of each omitted campaign")


class DayFit(BaseModel):
    day: int
    model: AttributionModel
    relative_deviation: float


class DailyStability(BaseModel):
    """Per-day fits against the global fit."""

    global_model: AttributionModel
    days: List[DayFit]
    max_relative_deviation: float
    flagged_days: List[int] = Field(default_factory=list, description="Days deviating more than the shift threshold")


def group_by_campaign(samples: Sequence[AttributionSample]) -> Dict[str, List[AttributionSample]]:
    grouped: Dict[str, List[AttributionSample]] = defaultdict(list)
    for sample in samples:
        grouped[sample.campaign_id].append(sample)
    return dict(grouped)


def fit_per_advertiser(
    grouped: Mapping[str, Sequence[AttributionSample]],
    min_samples: int = settings.MIN_SAMPLES_PER_ADVERTISER,
    workers: int = 1,
    **fit_options,
) -> AdvertiserFits:
    """Independent fit for every campaign holding at least ``min_samples`` samples."""
    eligible = sorted(c for c, s in grouped.items() if len(s) >= min_samples)
    omitted = {c: len(grouped[c]) for c in sorted(grouped) if len(grouped[c]) < min_samples}

    def fit(campaign: str) -> AttributionModel:
        return fit_lambda(grouped[campaign], campaign_id=campaign, **fit_options)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fitted = list(pool.map(fit, eligible))
    else:
        fitted = [fit(c) for c in eligible]

    if omitted:
        logger.info(f"Omitted {len(omitted)} campaigns with fewer than {min_samples} samples")
    return AdvertiserFits(models=dict(zip(eligible, fitted)), omitted=omitted)


def daily_stability(
    samples: Sequence[AttributionSample],
    global_model: Optional[AttributionModel] = None,
    shift_threshold: float = 0.25,
    **fit_options,
) -> DailyStability:
    """Fit each conversion day separately and report the relative deviation from the global rate."""
    by_day: Dict[int, List[AttributionSample]] = defaultdict(list)
    for sample in samples:
        by_day[sample.day].append(sample)
    if len(by_day) < 2:
        raise InsufficientDataError(f"daily stability needs at least 2 days, got {len(by_day)}")

    global_model = global_model or fit_lambda(samples, **fit_options)
    reference = global_model.decay_rate
    days = []
    for day in sorted(by_day):
        model = fit_lambda(by_day[day], **fit_options)
        deviation = abs(model.decay_rate - reference) / reference if reference > 0 else float("inf")
        days.append(DayFit(day=day, model=model, relative_deviation=deviation))

    max_deviation = max(d.relative_deviation for d in days)
    flagged = [d.day for d in days if d.relative_deviation > shift_threshold]
    logger.info(f"Daily lambda over {len(days)} days: max relative deviation {max_deviation:.4%}")
    if flagged:
        logger.warning(f"Days deviating more than {shift_threshold:.0%} from the global rate: {flagged}")
    return DailyStability(global_model=global_model, days=days, max_relative_deviation=max_deviation, flagged_days=flagged)
