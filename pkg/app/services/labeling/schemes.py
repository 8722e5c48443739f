"""Credit split of one conversion over the clicks that preceded it."""
import math
from typing import List, Sequence

from app.core.exceptions import AttributionDomainError
from app.schemas.attribution import AttributionScheme, SchemeKind


def _check_click_times(click_times: Sequence[float]) -> None:
    if not click_times:
        raise AttributionDomainError("a conversion needs at least one click to label")
    for previous, current in zip(click_times, click_times[1:]):
        if current < previous:
            raise AttributionDomainError(f"click times must be time-ordered, got {current} after {previous}")


def model_click_weights(click_times: Sequence[float], decay_rate: float, normalized: bool) -> List[float]:
    """Successive marginal contributions: 1 for the first click, 1 - exp(-lambda * gap) after it."""
    _check_click_times(click_times)
    weights = [1.0]
    for previous, current in zip(click_times, click_times[1:]):
        weights.append(-math.expm1(-decay_rate * (current - previous)))
    if normalized:
        total = math.fsum(weights)
        weights = [w / total for w in weights]
    return weights


def label_conversion_clicks(click_times: Sequence[float], scheme: AttributionScheme) -> List[float]:
    """Weight of each click of one conversion under ``scheme``.

    Raises:
        AttributionDomainError: empty or unordered click list.
    """
    _check_click_times(click_times)
    k = len(click_times)
    if scheme.kind == SchemeKind.LAST_CLICK:
        return [0.0] * (k - 1) + [1.0]
    if scheme.kind == SchemeKind.FIRST_CLICK:
        return [1.0] + [0.0] * (k - 1)
    if scheme.kind == SchemeKind.UNIFORM:
        return [1.0 / k] * k
    if scheme.kind == SchemeKind.ALL_CLICKS:
        return [1.0] * k
    return model_click_weights(click_times, scheme.model.decay_rate, scheme.normalized)
