"""Post-click conversion model: hashing, training, prediction and calibration.

Usage:
    from app.services.conversion import train_on_clicks, predict_batch, hash_matrix

    model = train_on_clicks(clicks, bits=18, l2=1.0)
    probabilities = predict_batch(model, hash_matrix(feature_lists, 18))
"""

from .hashing import (
    RECENCY_FIELD,
    context_features,
    feature_index,
    fnv1a_64,
    hash_features,
    hash_matrix,
    recency_bucket,
    vectors_matrix,
)
from .logistic import fit_logistic, logistic_loss, train, train_on_clicks
from .prediction import calibrate, predict, predict_batch, raw_probability, with_calibration
from .store import load_conversion_model, save_conversion_model

__all__ = [
    "RECENCY_FIELD",
    "calibrate",
    "context_features",
    "feature_index",
    "fit_logistic",
    "fnv1a_64",
    "hash_features",
    "hash_matrix",
    "load_conversion_model",
    "logistic_loss",
    "predict",
    "predict_batch",
    "raw_probability",
    "recency_bucket",
    "save_conversion_model",
    "train",
    "train_on_clicks",
    "vectors_matrix",
    "with_calibration",
]
