"""Post-click training sets: one weighted example per clicked record."""
import csv
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

from app.schemas.attribution import AttributionScheme
from app.schemas.records import ImpressionRecord, LabeledClick, TimelineKey, UserTimeline
from app.services.conversion.hashing import context_features
from app.services.data.timelines import ConversionIndex, time_since_last_click
from app.services.labeling.schemes import label_conversion_clicks

logger = logging.getLogger(__name__)


def build_training_set(
    records: Sequence[ImpressionRecord],
    timelines: Mapping[TimelineKey, UserTimeline],
    scheme: AttributionScheme,
    index: Optional[ConversionIndex] = None,
    window: Optional[int] = None,
    recency: bool = True,
) -> List[LabeledClick]:
    """Label every clicked record of ``records`` with its credit under ``scheme``.

    Clicks of an attributed conversion get the scheme weight; clicks with no
    attributed conversion in the window get weight 0. Unclicked records are
    not examples.
    """
    index = index or ConversionIndex(timelines, window)
    group_weights: Dict[int, List[float]] = {}
    examples: List[LabeledClick] = []
    for record in records:
        if not record.click:
            continue
        weight = 0.0
        found = index.lookup(record)
        if found is not None:
            group, position = found
            if group.attributed:
                weights = group_weights.get(id(group))
                if weights is None:
                    weights = label_conversion_clicks(group.click_times, scheme)
                    group_weights[id(group)] = weights
                weight = weights[position]
        delta_c = time_since_last_click(timelines[record.key], record.timestamp)
        examples.append(
            LabeledClick(record=record, features=context_features(record, delta_c, recency), weight=min(weight, 1.0))
        )

    positives = sum(1 for e in examples if e.label)
    logger.info(f"Built {scheme.kind.value} training set: {len(examples)} clicks, {positives} positive")
    return examples


def dump_training_set(examples: Sequence[LabeledClick], path: Union[str, Path], delimiter: str = "\t") -> Path:
    """Delimited dump: record id, timestamp, user, campaign, one column per feature field, weight, label."""
    fields = sorted({field for e in examples for field, _ in e.features})
    header = ["record_id", "timestamp", "uid", "campaign"] + [f"f{field}" for field in fields] + ["weight", "label"]

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, delimiter=delimiter, lineterminator="\n", quoting=csv.QUOTE_NONE)
        writer.writerow(header)
        for example in examples:
            tokens = dict(example.features)
            record = example.record
            writer.writerow(
                [record.record_id, record.timestamp, record.user_id, record.campaign_id]
                + [tokens.get(field, "") for field in fields]
                + [repr(example.weight), "1" if example.label else "0"]
            )
    logger.info(f"Wrote {len(examples)} training examples to {path}")
    return path
