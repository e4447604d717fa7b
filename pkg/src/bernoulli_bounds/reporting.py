"""
Output records and their CSV / JSON serializations.

Records carry no timestamps: the same command with the same settings writes
byte-identical files.
"""

import csv
import io
import json
import logging
import math
import sys
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterator, List, Literal, Optional

from pydantic import BaseModel, Field

from .config import SCHEMA_VERSION

logger = logging.getLogger(__name__)

OutputFormat = Literal["csv", "json"]


class OutputRecord(BaseModel):
    """Rows produced by one CLI command plus everything needed to re-run it."""

    schema_version: str = SCHEMA_VERSION
    command: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)


def _jsonable(value: Any) -> Any:
    """Replace non-finite floats, which strict JSON cannot carry, by strings."""
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def to_json(record: OutputRecord) -> str:
    """UTF-8 JSON with sorted keys."""
    payload = _jsonable(record.model_dump(mode="json"))
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


@contextmanager
def unlimited_int_digits() -> Iterator[None]:
    """Lift the interpreter cap on int-to-str conversion (Python 3.11+) for the block."""
    getter = getattr(sys, "get_int_max_str_digits", None)
    if getter is None:
        yield
        return
    previous = getter()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(previous)


def rational_text(value: Fraction) -> str:
    """``a/b`` text of an exact rational of any size."""
    with unlimited_int_digits():
        return str(value)


def _columns(rows: List[Dict[str, Any]]) -> List[str]:
    columns: List[str] = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)
    return columns


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (dict, list)):
        return json.dumps(_jsonable(value), sort_keys=True)
    return str(value)


def to_csv(record: OutputRecord) -> str:
    """
    RFC 4180 CSV: CRLF line ends, minimal quoting.

    Schema version, command and parameters precede the header as ``#`` lines.
    """
    buffer = io.StringIO()
    buffer.write(f"# schema_version={record.schema_version}\r\n")
    buffer.write(f"# command={record.command}\r\n")
    for key in sorted(record.parameters):
        buffer.write(f"# {key}={_cell(record.parameters[key])}\r\n")
    for key in sorted(record.metadata):
        buffer.write(f"# {key}={_cell(record.metadata[key])}\r\n")
    columns = _columns(record.rows)
    writer = csv.writer(buffer, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    if columns:
        writer.writerow(columns)
        for row in record.rows:
            writer.writerow([_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def read_csv_rows(text: str) -> List[Dict[str, str]]:
    """Parse rows written by ``to_csv``, skipping the ``#`` preamble."""
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(body))


def render(record: OutputRecord, fmt: OutputFormat) -> str:
    if fmt == "json":
        return to_json(record)
    if fmt == "csv":
        return to_csv(record)
    raise ValueError(f"unsupported format {fmt!r}")


def write_record(record: OutputRecord, fmt: OutputFormat, out: Optional[Path] = None) -> str:
    """Render ``record``; write it to ``out`` when given. Returns the text."""
    text = render(record, fmt)
    if out is not None:
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        # newline="" keeps the CRLF row ends of the CSV intact
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        logger.info(f"Wrote {record.command} output to {out}")
    return text
