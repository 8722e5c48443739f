"""Versioned JSON documents for conversion models."""
import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import ValidationError

from app.core.exceptions import ConfigError
from app.schemas.conversion import MODEL_FORMAT, MODEL_FORMAT_VERSION, ConversionModelDocument, LinearConversionModel

logger = logging.getLogger(__name__)


def to_document(model: LinearConversionModel) -> ConversionModelDocument:
    nonzero = np.flatnonzero(model.weights)
    return ConversionModelDocument(
        hash_bits=model.bits,
        l2=model.l2,
        bias=model.bias,
        calibration=model.calibration,
        weights={int(i): float(model.weights[i]) for i in nonzero},
    )


def from_document(document: ConversionModelDocument) -> LinearConversionModel:
    if document.format != MODEL_FORMAT or document.version != MODEL_FORMAT_VERSION:
        raise ConfigError(f"unsupported model document {document.format} v{document.version}")
    size = 1 << document.hash_bits
    weights = np.zeros(size)
    for index, value in document.weights.items():
        if not 0 <= index < size:
            raise ConfigError(f"weight index {index} outside 2**{document.hash_bits}")
        weights[index] = value
    return LinearConversionModel(weights=weights, bias=document.bias, l2=document.l2, calibration=document.calibration)


def save_conversion_model(model: LinearConversionModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # json.dumps writes floats with repr, so weights reload bit-exactly
    path.write_text(json.dumps(to_document(model).model_dump(), indent=1) + "\n", encoding="utf-8")
    logger.info(f"Saved conversion model to {path}")
    return path


def load_conversion_model(path: Union[str, Path]) -> LinearConversionModel:
    try:
        document = ConversionModelDocument.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ConfigError(f"cannot read conversion model {path}: {e}")
    return from_document(document)
