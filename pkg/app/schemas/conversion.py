"""Conversion-model types: hashed feature vectors, the linear model and its persisted document."""
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from pydantic import BaseModel, Field

MODEL_FORMAT = "linear-conversion-model"
MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True, slots=True)
class HashedFeatureVector:
    """Sparse binary vector: strictly increasing active indices in [0, 2**bits)."""

    indices: Tuple[int, ...]
    bits: int

    def __post_init__(self) -> None:
        size = 1 << self.bits
        previous = -1
        for index in self.indices:
            if index <= previous or index >= size:
                raise ValueError("indices must be strictly increasing and below 2**bits")
            previous = index


@dataclass(frozen=True)
class LinearConversionModel:
    """Hashed logistic regression with a scalar output calibration."""

    weights: np.ndarray
    bias: float
    l2: float
    calibration: float = 1.0

    def __post_init__(self) -> None:
        if self.calibration <= 0:
            raise ValueError("calibration must be positive")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")
        self.weights.setflags(write=False)

    @property
    def bits(self) -> int:
        return int(self.weights.shape[0]).bit_length() - 1


class ConversionModelDocument(BaseModel):
    """Versioned on-disk form of a LinearConversionModel (sparse non-zero weights)."""

    format: str = Field(MODEL_FORMAT)
    version: int = Field(MODEL_FORMAT_VERSION)
    hash_bits: int = Field(..., ge=1)
    l2: float = Field(..., ge=0)
    bias: float
    calibration: float = Field(..., gt=0)
    weights: Dict[int, float] = Field(default_factory=dict, description="Non-zero weights by hashed index")
