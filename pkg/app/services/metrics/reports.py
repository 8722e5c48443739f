"""Report and curve writers (TSV and JSON)."""
import json
import logging
from pathlib import Path
from typing import Iterable, Sequence, Union

import pandas as pd
from pydantic import BaseModel

from app.schemas.metrics import UpliftReport, UtilityReport

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _write_rows(rows: Sequence[BaseModel], tsv_path: PathLike, json_path: PathLike) -> None:
    documents = [row.model_dump(mode="json") for row in rows]
    for path in (tsv_path, json_path):
        Path(path).parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(documents).to_csv(tsv_path, sep="\t", index=False, na_rep="")
    Path(json_path).write_text(json.dumps(documents, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"Wrote {len(documents)} report rows to {tsv_path} and {json_path}")


def write_utility_reports(reports: Iterable[UtilityReport], tsv_path: PathLike, json_path: PathLike) -> None:
    _write_rows(list(reports), tsv_path, json_path)


def write_uplift_reports(reports: Iterable[UpliftReport], tsv_path: PathLike, json_path: PathLike) -> None:
    _write_rows(list(reports), tsv_path, json_path)


def write_curve(frame: pd.DataFrame, path: PathLike) -> Path:
    """Bucketed curve as CSV for plotting."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    return path
