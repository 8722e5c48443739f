"""Calibrated conversion probabilities and the spend-equalizing calibration."""
import dataclasses
import logging
from typing import Callable, Sequence, TypeVar

import numpy as np
from scipy import optimize, sparse
from scipy.special import expit

from app.core.exceptions import CalibrationError
from app.schemas.conversion import HashedFeatureVector, LinearConversionModel

logger = logging.getLogger(__name__)

R = TypeVar("R")

CALIBRATION_RTOL = 1e-6
_MAX_DOUBLINGS = 200


def raw_probability(model: LinearConversionModel, X: sparse.csr_matrix) -> np.ndarray:
    """Uncalibrated sigmoid(bias + x . w) per row."""
    if X.shape[1] != model.weights.shape[0]:
        raise ValueError(f"design matrix has {X.shape[1]} columns, model expects {model.weights.shape[0]}")
    return expit(X @ model.weights + model.bias)


def predict(model: LinearConversionModel, x: HashedFeatureVector) -> float:
    """min(1, calibration * sigmoid(bias + sum of active weights))."""
    if x.bits != model.bits:
        raise ValueError(f"vector hashed with {x.bits} bits, model expects {model.bits}")
    score = model.bias + float(np.sum(model.weights[list(x.indices)]))
    return min(1.0, model.calibration * float(expit(score)))


def predict_batch(model: LinearConversionModel, X: sparse.csr_matrix) -> np.ndarray:
    return np.minimum(1.0, model.calibration * raw_probability(model, X))


def with_calibration(model: LinearConversionModel, calibration: float) -> LinearConversionModel:
    return dataclasses.replace(model, calibration=calibration)


def calibrate(
    model: LinearConversionModel,
    bid_function: Callable[[LinearConversionModel, Sequence[R]], np.ndarray],
    eval_records: Sequence[R],
    reference_total: float,
) -> LinearConversionModel:
    """Set the calibration so the bids ``bid_function`` places on ``eval_records`` sum to ``reference_total``.

    Exact scaling when no prediction clamps at 1, bisection on the multiplier otherwise.

    Raises:
        CalibrationError: empty evaluation set, all-zero bids or an unreachable reference.
    """
    if not eval_records:
        raise CalibrationError("calibration needs a non-empty evaluation set")
    if not reference_total > 0:
        raise CalibrationError(f"reference total must be positive, got {reference_total}")

    def total(calibration: float) -> float:
        return float(np.sum(bid_function(with_calibration(model, calibration), eval_records)))

    current = total(model.calibration)
    if current <= 0:
        raise CalibrationError("all bids are zero, cannot calibrate")

    scaled = model.calibration * reference_total / current
    achieved = total(scaled)
    if abs(achieved - reference_total) <= CALIBRATION_RTOL * reference_total:
        logger.info(f"Calibration {model.calibration:.6g} -> {scaled:.6g} by exact scaling")
        return with_calibration(model, scaled)

    # Clamping at 1 makes the total concave in the multiplier; bracket and bisect.
    low, high = scaled, scaled
    if achieved < reference_total:
        for _ in range(_MAX_DOUBLINGS):
            high *= 2.0
            if total(high) >= reference_total:
                break
        else:
            raise CalibrationError(
                f"bids saturate at {total(high):.6g} below the reference total {reference_total:.6g}"
            )
    else:
        while total(low) > reference_total:
            low /= 2.0
    solved = optimize.bisect(
        lambda c: total(c) - reference_total, low, high, xtol=low * 1e-12, rtol=1e-12, maxiter=500
    )
    logger.info(f"Calibration {model.calibration:.6g} -> {solved:.6g} by bisection (clamping active)")
    return with_calibration(model, float(solved))
