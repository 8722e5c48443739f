"""Exponential-decay attribution model and its maximum-likelihood fit.

P(attributed | conversion, delay d) = exp(-lambda * d). The negative
log-likelihood over samples (d_i, a_i) is

    NLLH(lambda) = sum_i lambda * a_i * d_i - (1 - a_i) * log(1 - exp(-lambda * d_i))

which is convex in lambda, so its gradient is monotone and the optimum is
found by bisection on the gradient.
"""
import logging
import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from app.core.config import settings
from app.core.exceptions import AttributionDomainError
from app.schemas.attribution import AttributionModel
from app.schemas.records import AttributionSample

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
SampleInput = Union[Sequence[AttributionSample], Tuple[np.ndarray, np.ndarray]]

BOUNDARY_ALL_ATTRIBUTED = "boundary: all attributed"
BOUNDARY_NONE_ATTRIBUTED = "boundary: none attributed"
BOUNDARY_LOWER = "boundary: lower bound"
BOUNDARY_UPPER = "boundary: upper bound"

_LN2 = math.log(2.0)


def sample_arrays(samples: SampleInput) -> Tuple[np.ndarray, np.ndarray]:
    """Delays and attribution labels as float arrays."""
    if isinstance(samples, tuple):
        deltas, labels = samples
        return np.asarray(deltas, dtype=float), np.asarray(labels, dtype=float)
    deltas = np.fromiter((s.delta for s in samples), dtype=float, count=len(samples))
    labels = np.fromiter((s.attributed for s in samples), dtype=float, count=len(samples))
    return deltas, labels


def log1mexp(x: np.ndarray) -> np.ndarray:
    """log(1 - exp(-x)) for x > 0 without cancellation at either end."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < _LN2
    out[small] = np.log(-np.expm1(-x[small]))
    out[~small] = np.log1p(-np.exp(-x[~small]))
    return out


def attribution_probability(model: AttributionModel, delta: ArrayLike) -> ArrayLike:
    """exp(-lambda * delta): probability a conversion ``delta`` seconds after the last click stays attributed."""
    d = np.asarray(delta, dtype=float)
    if np.any(d < 0):
        raise AttributionDomainError(f"delta must be non-negative, got {delta}")
    result = np.exp(-model.decay_rate * d)
    return float(result) if result.ndim == 0 else result


def marginal_contribution(model: AttributionModel, delta_c: Optional[float]) -> float:
    """1 - exp(-lambda * delta_c): attribution a new click adds over the previous one.

    No previous click (``delta_c`` is None) gives full credit.
    """
    if delta_c is None:
        return 1.0
    if delta_c < 0:
        raise AttributionDomainError(f"delta_c must be non-negative, got {delta_c}")
    return float(-math.expm1(-model.decay_rate * delta_c))


def marginal_contributions(decay_rate: float, delta_c: np.ndarray) -> np.ndarray:
    """Vectorized marginal contribution; NaN entries mean no previous click and give 1."""
    delta_c = np.asarray(delta_c, dtype=float)
    out = np.ones_like(delta_c)
    present = ~np.isnan(delta_c)
    out[present] = -np.expm1(-decay_rate * delta_c[present])
    return out


def half_life(model: AttributionModel) -> float:
    """Seconds after which the attribution probability halves."""
    return math.inf if model.decay_rate == 0 else _LN2 / model.decay_rate


def nllh(decay_rate: float, samples: SampleInput) -> float:
    """Negative log-likelihood of the samples; +inf at lambda = 0 with any unattributed sample."""
    if decay_rate < 0:
        raise AttributionDomainError(f"lambda must be non-negative, got {decay_rate}")
    deltas, labels = sample_arrays(samples)
    if deltas.size == 0:
        raise AttributionDomainError("nllh needs at least one sample")
    attributed_term = decay_rate * float(np.sum(labels * deltas))
    unattributed = labels == 0
    if not np.any(unattributed):
        return attributed_term
    if decay_rate == 0:
        return math.inf
    return attributed_term - float(np.sum(log1mexp(decay_rate * deltas[unattributed])))


def nllh_gradient(decay_rate: float, samples: SampleInput) -> float:
    """d NLLH / d lambda = sum a_i d_i - (1 - a_i) d_i / (exp(lambda d_i) - 1)."""
    if decay_rate <= 0:
        raise AttributionDomainError(f"gradient needs lambda > 0, got {decay_rate}")
    deltas, labels = sample_arrays(samples)
    unattributed = labels == 0
    d0 = deltas[unattributed]
    # expm1 overflows to inf for huge lambda * delay; d / inf is the exact limit 0
    with np.errstate(over="ignore"):
        unattributed_term = float(np.sum(d0 / np.expm1(decay_rate * d0)))
    return float(np.sum(labels * deltas)) - unattributed_term


def fit_lambda(
    samples: SampleInput,
    tolerance: float = settings.FIT_TOLERANCE,
    max_iter: int = settings.FIT_MAX_ITER,
    lambda_min: float = settings.LAMBDA_MIN,
    lambda_max: float = settings.LAMBDA_MAX,
    fitted_at: Optional[int] = None,
    campaign_id: Optional[str] = None,
) -> AttributionModel:
    """Maximum-likelihood decay rate on [lambda_min, lambda_max].

    ``converged`` is true when ``|NLLH'(lambda)| * lambda`` is within
    ``tolerance`` or the bracket is narrower than ``lambda * 1e-9``. Optima at a bracket end return a flagged,
    unconverged model instead of raising.
    """
    deltas, labels = sample_arrays(samples)
    n = int(deltas.size)
    if n == 0:
        raise AttributionDomainError("fit_lambda needs at least one sample")
    if np.any(deltas <= 0):
        raise AttributionDomainError("sample delays must be positive")

    def boundary_model(rate: float, flag: str) -> AttributionModel:
        logger.warning(f"Attribution fit at {flag} (lambda={rate:g}, n={n})")
        return AttributionModel(
            decay_rate=rate,
            n_samples=n,
            final_nllh=nllh(rate, (deltas, labels)),
            converged=False,
            boundary=flag,
            campaign_id=campaign_id,
            fitted_at=fitted_at,
        )

    n_attributed = int(labels.sum())
    if n_attributed == n:
        return boundary_model(lambda_min, BOUNDARY_ALL_ATTRIBUTED)
    if n_attributed == 0:
        return boundary_model(lambda_max, BOUNDARY_NONE_ATTRIBUTED)

    def gradient(rate: float) -> float:
        return nllh_gradient(rate, (deltas, labels))

    if gradient(lambda_min) >= 0:
        return boundary_model(lambda_min, BOUNDARY_LOWER)
    if gradient(lambda_max) <= 0:
        return boundary_model(lambda_max, BOUNDARY_UPPER)

    rate, result = optimize.bisect(
        gradient,
        lambda_min,
        lambda_max,
        xtol=lambda_min * 1e-9,
        rtol=1e-9,
        maxiter=max_iter,
        full_output=True,
        disp=False,
    )
    stationary = abs(gradient(rate)) * rate <= tolerance
    converged = bool(result.converged or stationary)
    model = AttributionModel(
        decay_rate=float(rate),
        n_samples=n,
        final_nllh=nllh(rate, (deltas, labels)),
        converged=converged,
        campaign_id=campaign_id,
        fitted_at=fitted_at,
    )
    logger.info(
        f"Fitted lambda={model.decay_rate:.6g}/s (half-life {half_life(model) / 3600:.1f} h) "
        f"on {n} samples in {result.iterations} iterations, converged={converged}"
    )
    return model
