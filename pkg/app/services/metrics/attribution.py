"""Per-display attribution functions a(x) of the attribution-aware utility."""
from typing import Dict, List, Optional, Sequence

import numpy as np

from app.schemas.attribution import AttributionFunction, AttributionFunctionKind
from app.schemas.records import ConversionGroup, ImpressionRecord
from app.services.data.timelines import ConversionIndex
from app.services.labeling.schemes import model_click_weights


def _group_weights(fn: AttributionFunction, group: ConversionGroup) -> List[float]:
    if fn.kind == AttributionFunctionKind.LAST_CLICK:
        return [0.0] * (len(group.clicks) - 1) + [1.0]
    return model_click_weights(
        group.click_times, fn.model.decay_rate, normalized=fn.kind == AttributionFunctionKind.MODEL_NORMALIZED
    )


def attribution_weight(fn: AttributionFunction, record: ImpressionRecord, conversion: Optional[ConversionGroup]) -> float:
    """Credit of ``record`` toward ``conversion`` under ``fn``; 0 for unclicked or unattributed displays."""
    if not record.click or conversion is None or not conversion.attributed:
        return 0.0
    for position, click in enumerate(conversion.clicks):
        if click is record:
            return _group_weights(fn, conversion)[position]
    return 0.0


def attribution_weights(
    fn: AttributionFunction, records: Sequence[ImpressionRecord], index: ConversionIndex
) -> np.ndarray:
    """``attribution_weight`` for every record, conversion groups resolved through ``index``."""
    cache: Dict[int, List[float]] = {}
    out = np.zeros(len(records))
    for i, record in enumerate(records):
        if not record.click:
            continue
        found = index.lookup(record)
        if found is None:
            continue
        group, position = found
        if not group.attributed:
            continue
        weights = cache.get(id(group))
        if weights is None:
            weights = _group_weights(fn, group)
            cache[id(group)] = weights
        out[i] = weights[position]
    return out


def raw_attribution_flags(records: Sequence[ImpressionRecord]) -> np.ndarray:
    """Logged last-click attribution a_i of each display, from its click_pos and click_nb."""
    return np.fromiter((1.0 if r.is_raw_last_click else 0.0 for r in records), dtype=float, count=len(records))
