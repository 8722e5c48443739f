"""L2-penalized logistic regression on hashed features, trained with L-BFGS."""
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, sparse
from scipy.special import expit

from app.core.config import settings
from app.core.exceptions import TrainingError
from app.schemas.conversion import HashedFeatureVector, LinearConversionModel
from app.schemas.records import LabeledClick
from app.services.conversion.hashing import hash_matrix, vectors_matrix

logger = logging.getLogger(__name__)

Example = Tuple[HashedFeatureVector, float, bool]


def logistic_loss(
    params: np.ndarray, X: sparse.csr_matrix, targets: np.ndarray, l2: float
) -> Tuple[float, np.ndarray]:
    """Regularized cross-entropy with soft targets and its gradient.

    ``params`` is the weight vector followed by the bias; the bias is not penalized.
    """
    w, b = params[:-1], params[-1]
    z = X @ w + b
    loss = float(np.sum(np.logaddexp(0.0, z) - targets * z)) + 0.5 * l2 * float(w @ w)
    residual = expit(z) - targets
    grad = np.empty_like(params)
    grad[:-1] = X.T @ residual + l2 * w
    grad[-1] = residual.sum()
    return loss, grad


def fit_logistic(
    X: sparse.csr_matrix,
    targets: np.ndarray,
    l2: float = settings.DEFAULT_L2,
    max_iter: int = settings.LBFGS_MAX_ITER,
    tolerance: float = settings.LBFGS_TOLERANCE,
) -> LinearConversionModel:
    """Minimize ``logistic_loss`` from zero; targets are the example weights in [0, 1].

    Raises:
        TrainingError: single-class data or a non-finite loss.
    """
    targets = np.asarray(targets, dtype=float)
    positive, negative = float(targets.sum()), float((1.0 - targets).sum())
    if positive <= 0 or negative <= 0:
        raise TrainingError(
            f"training needs positive and negative weight, got {positive:g} positive / {negative:g} negative",
            details={"n_examples": int(targets.shape[0])},
        )

    X = sparse.csr_matrix(X)
    x0 = np.zeros(X.shape[1] + 1)
    result = optimize.minimize(
        logistic_loss,
        x0,
        args=(X, targets, l2),
        method="L-BFGS-B",
        jac=True,
        options={"maxiter": max_iter, "gtol": tolerance, "ftol": np.finfo(float).eps},
    )
    if not math.isfinite(result.fun):
        raise TrainingError(
            f"non-finite training loss after {result.nit} iterations",
            details={"iterations": int(result.nit), "message": str(result.message)},
        )
    grad_norm = float(np.max(np.abs(result.jac)))
    if grad_norm > tolerance:
        logger.warning(
            f"L-BFGS stopped after {result.nit} iterations with gradient norm {grad_norm:.3g} > {tolerance:g}: "
            f"{result.message}"
        )
    logger.info(f"Trained logistic model on {X.shape[0]} examples: loss={result.fun:.6g}, iterations={result.nit}")
    return LinearConversionModel(weights=result.x[:-1].copy(), bias=float(result.x[-1]), l2=l2)


def train(
    examples: Sequence[Example],
    l2: float = settings.DEFAULT_L2,
    max_iter: int = settings.LBFGS_MAX_ITER,
    tolerance: float = settings.LBFGS_TOLERANCE,
    bits: Optional[int] = None,
) -> LinearConversionModel:
    """Train on (hashed vector, weight, label) triples."""
    if not examples and bits is None:
        raise TrainingError("no training examples")
    bits = bits if bits is not None else examples[0][0].bits
    X = vectors_matrix([e[0] for e in examples], bits)
    targets = np.fromiter((e[1] for e in examples), dtype=float, count=len(examples))
    return fit_logistic(X, targets, l2, max_iter, tolerance)


def train_on_clicks(
    clicks: Sequence[LabeledClick],
    bits: int = settings.DEFAULT_HASH_BITS,
    l2: float = settings.DEFAULT_L2,
    max_iter: int = settings.LBFGS_MAX_ITER,
    tolerance: float = settings.LBFGS_TOLERANCE,
) -> LinearConversionModel:
    """Hash a labeled training set and train on it."""
    X = hash_matrix([c.features for c in clicks], bits)
    targets = np.fromiter((c.weight for c in clicks), dtype=float, count=len(clicks))
    return fit_logistic(X, targets, l2, max_iter, tolerance)
