"""Sliding train/test split by calendar day."""
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from app.core.config import settings
from app.core.exceptions import InsufficientDataError
from app.schemas.records import ImpressionRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitPair:
    """Training records of ``train_days`` consecutive days and the test day right after them."""

    index: int
    train_day_range: Tuple[int, int]
    test_day: int
    train: Tuple[ImpressionRecord, ...]
    test: Tuple[ImpressionRecord, ...]


def sliding_split(
    records: Sequence[ImpressionRecord],
    train_days: int = settings.TRAIN_DAYS,
    test_days: int = settings.TEST_DAYS,
) -> List[SplitPair]:
    """Test on each of the last ``test_days`` days, training on the ``train_days`` days before it.

    Day indices are ``timestamp // 86400`` counted from the first day of the log.
    """
    if not records:
        raise InsufficientDataError(f"need at least {train_days + 1} days of log, got 0")

    by_day: Dict[int, List[ImpressionRecord]] = defaultdict(list)
    for record in records:
        by_day[record.day].append(record)
    first_day = min(by_day)
    last_day = max(by_day)
    available = last_day - first_day + 1
    if available < train_days + 1:
        raise InsufficientDataError(f"need at least {train_days + 1} days of log, got {available}")

    n_pairs = min(test_days, available - train_days)
    pairs = []
    for k in range(n_pairs):
        test_day = last_day - n_pairs + 1 + k
        start = test_day - train_days
        train = tuple(r for day in range(start, test_day) for r in by_day.get(day, ()))
        pairs.append(
            SplitPair(
                index=k,
                train_day_range=(start - first_day, test_day - first_day),
                test_day=test_day - first_day,
                train=train,
                test=tuple(by_day.get(test_day, ())),
            )
        )
        logger.info(
            f"Split {k}: train days [{start - first_day}, {test_day - first_day}) "
            f"({len(train)} records), test day {test_day - first_day} ({len(pairs[-1].test)} records)"
        )
    return pairs
