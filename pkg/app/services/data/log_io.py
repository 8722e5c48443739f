"""Delimited impression-log reader and writer."""
import csv
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TypeVar, Union

from app.core.exceptions import LogFormatError, SchemaViolationError
from app.schemas.experiment import REQUIRED_FIELDS, LogSchema
from app.schemas.records import ImpressionRecord

logger = logging.getLogger(__name__)

T = TypeVar("T")

csv.field_size_limit(sys.maxsize)


def _parse_bool(text: str) -> bool:
    if text == "1":
        return True
    if text == "0":
        return False
    raise ValueError(f"expected 0/1, got {text!r}")


def _parse_int(text: str) -> int:
    return int(text)


def _parse_money(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"non-finite amount {text!r}")
    return value


class _RowReader:
    """Resolves schema columns against a header row and parses typed fields."""

    def __init__(self, header: Sequence[str], schema: LogSchema) -> None:
        self.schema = schema
        self.width = len(header)
        self.null_tokens = set(schema.null_tokens)
        position = {name: i for i, name in enumerate(header)}

        missing = [schema.columns[f] for f in REQUIRED_FIELDS if schema.columns[f] not in position]
        if missing:
            raise LogFormatError(f"missing required columns {missing}", line_number=1)
        self.index: Dict[str, Optional[int]] = {f: position.get(col) for f, col in schema.columns.items()}

        if schema.feature_columns is not None:
            absent = [c for c in schema.feature_columns if c not in position]
            if absent:
                raise LogFormatError(f"missing feature columns {absent}", line_number=1)
            self.feature_index = [position[c] for c in schema.feature_columns]
        else:
            self.feature_index = [i for i, name in enumerate(header) if name.startswith(schema.feature_prefix)]

    def _raw(self, row: List[str], name: str) -> Optional[str]:
        i = self.index[name]
        if i is None:
            return None
        text = row[i]
        return None if text in self.null_tokens else text

    def required(self, row: List[str], name: str, parse: Callable[[str], T]) -> T:
        text = self._raw(row, name)
        if text is None:
            raise ValueError(f"empty required field '{name}'")
        try:
            return parse(text)
        except ValueError as e:
            raise ValueError(f"field '{name}': {e}") from e

    def optional(self, row: List[str], name: str, parse: Callable[[str], T]) -> Optional[T]:
        text = self._raw(row, name)
        if text is None:
            return None
        try:
            return parse(text)
        except ValueError as e:
            raise ValueError(f"field '{name}': {e}") from e

    def scaled_time(self, value: Optional[int]) -> Optional[int]:
        if value is None or self.schema.timestamp_scale == 1.0:
            return value
        return int(round(value * self.schema.timestamp_scale))

    def features(self, row: List[str]):
        return tuple(
            (field_index, sys.intern(row[col]))
            for field_index, col in enumerate(self.feature_index)
            if row[col] not in self.null_tokens
        )


def load_log(path: Union[str, Path], schema: Optional[LogSchema] = None) -> List[ImpressionRecord]:
    """Load a delimited impression log, one record per data line, in file order.

    Raises:
        LogFormatError: wrong column count or unparsable field, naming the line.
        SchemaViolationError: a line breaks a record invariant.
    """
    schema = schema or LogSchema()
    records: List[ImpressionRecord] = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f, delimiter=schema.delimiter, quoting=csv.QUOTE_NONE)
        header = next(reader, None)
        if header is None:
            raise LogFormatError("empty file, header row expected", line_number=1)
        rows = _RowReader(header, schema)

        for row in reader:
            line = reader.line_num
            if len(row) != rows.width:
                raise LogFormatError(f"expected {rows.width} columns, found {len(row)}", line_number=line)
            try:
                conversion_ts = rows.scaled_time(rows.optional(row, "conversion_timestamp", _parse_int))
                fields = dict(
                    timestamp=rows.scaled_time(rows.required(row, "timestamp", _parse_int)),
                    user_id=rows.required(row, "user_id", str),
                    campaign_id=rows.required(row, "campaign_id", str),
                    cost=rows.required(row, "cost", _parse_money),
                    cpo=rows.required(row, "cpo", _parse_money),
                    click=rows.required(row, "click", _parse_bool),
                    conversion=rows.required(row, "conversion", _parse_bool),
                    attribution=rows.required(row, "attribution", _parse_bool),
                    click_pos=rows.optional(row, "click_pos", _parse_int),
                    click_nb=rows.optional(row, "click_nb", _parse_int),
                    conversion_timestamp=conversion_ts,
                    conversion_value=rows.optional(row, "conversion_value", _parse_money),
                )
            except ValueError as e:
                raise LogFormatError(str(e), line_number=line) from e
            try:
                records.append(ImpressionRecord(record_id=len(records), features=rows.features(row), **fields))
            except ValueError as e:
                raise SchemaViolationError(str(e), line_number=line) from e

    logger.info(f"Loaded {len(records)} records from {path}")
    return records


def _format_value(value: Union[int, float, str]) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def write_log(
    records: Sequence[ImpressionRecord],
    path: Union[str, Path],
    schema: Optional[LogSchema] = None,
    n_feature_fields: Optional[int] = None,
) -> Path:
    """Write records in the format ``load_log`` reads back field for field."""
    schema = schema or LogSchema()
    if n_feature_fields is None:
        n_feature_fields = max((idx + 1 for r in records for idx, _ in r.features), default=0)
    feature_columns = schema.feature_columns or [f"{schema.feature_prefix}{i + 1}" for i in range(n_feature_fields)]
    fields = list(schema.columns)
    header = [schema.columns[f] for f in fields] + feature_columns
    null = schema.null_tokens[0]

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, delimiter=schema.delimiter, lineterminator="\n", quoting=csv.QUOTE_NONE)
        writer.writerow(header)
        for record in records:
            row = []
            for name in fields:
                value = getattr(record, name)
                if isinstance(value, bool):
                    row.append("1" if value else "0")
                elif value is None:
                    row.append(null)
                else:
                    row.append(_format_value(value))
            tokens = dict(record.features)
            row.extend(tokens.get(i, null) for i in range(len(feature_columns)))
            writer.writerow(row)

    logger.info(f"Wrote {len(records)} records to {path}")
    return path
