"""Record-level bootstrap bands and paired uplift significance."""
from typing import NamedTuple, Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import InsufficientDataError, MetricDomainError


class Uplift(NamedTuple):
    uplift: float
    significant: bool
    ci_low: float
    ci_high: float


def _resample_indices(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, n, size=n)


def bootstrap_ci(
    contributions: np.ndarray,
    n_resamples: int = settings.BOOTSTRAP_RESAMPLES,
    quantile: float = settings.BOOTSTRAP_QUANTILE,
    seed: int = settings.DEFAULT_SEED,
) -> Tuple[float, float]:
    """(quantile, 1 - quantile) band of the resampled sum.

    Contributions must be ordered by record id for the band to be permutation-free.
    """
    contributions = np.asarray(contributions, dtype=float)
    n = contributions.shape[0]
    if n == 0:
        raise InsufficientDataError("bootstrap needs at least one contribution")
    if n_resamples < 2 or not 0 < quantile <= 0.5:
        raise MetricDomainError(f"invalid bootstrap setup: {n_resamples} resamples, quantile {quantile}")
    rng = np.random.default_rng(seed)
    sums = np.array([contributions[_resample_indices(rng, n)].sum() for _ in range(n_resamples)])
    low, high = np.quantile(sums, [quantile, 1.0 - quantile])
    return float(low), float(high)


def uplift_significance(
    contributions_a: np.ndarray,
    contributions_b: np.ndarray,
    n_resamples: int = settings.BOOTSTRAP_RESAMPLES,
    quantile: float = settings.BOOTSTRAP_QUANTILE,
    seed: int = settings.DEFAULT_SEED,
) -> Uplift:
    """Relative uplift (sum a - sum b) / |sum b| with a paired bootstrap band.

    Significant when the band excludes 0.
    """
    a = np.asarray(contributions_a, dtype=float)
    b = np.asarray(contributions_b, dtype=float)
    if a.shape != b.shape:
        raise MetricDomainError("uplift needs contributions over the same records")
    if a.shape[0] == 0:
        raise InsufficientDataError("uplift needs at least one record")
    total_b = float(b.sum())
    if total_b == 0:
        raise MetricDomainError("reference utility is zero, relative uplift undefined")
    uplift = (float(a.sum()) - total_b) / abs(total_b)

    rng = np.random.default_rng(seed)
    n = a.shape[0]
    samples = []
    for _ in range(n_resamples):
        idx = _resample_indices(rng, n)
        sb = b[idx].sum()
        if sb != 0:
            samples.append((a[idx].sum() - sb) / abs(sb))
    if not samples:
        return Uplift(uplift, False, uplift, uplift)
    low, high = np.quantile(np.asarray(samples), [quantile, 1.0 - quantile])
    significant = bool(low > 0 or high < 0)
    return Uplift(uplift, significant, float(min(low, uplift)), float(max(high, uplift)))
