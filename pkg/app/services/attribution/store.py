"""Attribution model documents on disk."""
import json
import logging
from pathlib import Path
from typing import Union

from app.core.exceptions import ConfigError
from app.schemas.attribution import AttributionModel

logger = logging.getLogger(__name__)


def save_attribution_model(model: AttributionModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = model.model_dump(mode="python", by_alias=True)
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"Saved attribution model to {path}")
    return path


def load_attribution_model(path: Union[str, Path]) -> AttributionModel:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read attribution model {path}: {e}")
    if document.get("model_family", "exponential") != "exponential":
        raise ConfigError(f"unsupported attribution model family {document['model_family']!r}")
    return AttributionModel.model_validate(document)
