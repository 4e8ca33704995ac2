"""
Record output as CSV or JSON.

A record is an ordered mapping of column name to value. Values may be numbers,
strings, booleans, None, complex numbers or flat sequences of those. In CSV a complex
value becomes two adjacent columns <name>_re, <name>_im and a sequence becomes
<name>_0, <name>_1, ...; floats are written with 17 significant digits. JSON writes
{"meta": ..., "records": [...]} with complex numbers as [re, im] pairs.
Output depends only on the records and meta, never on timing or thread count.
"""

import csv
import io
import json
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from sources.logger import Logger
from sources.schemas import OutputSpec

logger = Logger("exporter.log")

FLOAT_FORMAT = "{:.17g}"


def _flatten(name: str, value: Any) -> List[tuple]:
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (np.generic,)):
        value = value.item()
    if isinstance(value, complex):
        return [(f"{name}_re", value.real), (f"{name}_im", value.imag)]
    if isinstance(value, (list, tuple)):
        cells = []
        for index, item in enumerate(value):
            cells.extend(_flatten(f"{name}_{index}", item))
        return cells
    return [(name, value)]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return FLOAT_FORMAT.format(value)
    return str(value)


def to_plain(value: Any) -> Any:
    """JSON-ready copy: numpy and complex values turned into lists and floats."""
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return to_plain(value.item())
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    return value


def render_csv(records: Sequence[Dict[str, Any]]) -> str:
    """Header from the union of flattened columns in first-seen order."""
    rows = [_flatten_record(r) for r in records]
    header: List[str] = []
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row.get(key)) for key in header])
    return buffer.getvalue()


def _flatten_record(record: Dict[str, Any]) -> Dict[str, Any]:
    row: Dict[str, Any] = {}
    for name, value in record.items():
        for key, cell in _flatten(name, value):
            row[key] = cell
    return row


def render_json(records: Sequence[Dict[str, Any]], meta: Dict[str, Any]) -> str:
    return json.dumps({"meta": to_plain(meta), "records": to_plain(list(records))}, indent=2) + "\n"


def render(records: Sequence[Dict[str, Any]], meta: Dict[str, Any], fmt: str) -> str:
    if fmt == "csv":
        return render_csv(records)
    return render_json(records, meta)


def write_output(records: Sequence[Dict[str, Any]], meta: Dict[str, Any], output: OutputSpec,
                 stream: Optional[io.TextIOBase] = None) -> str:
    """Render and write to output.path, or to stream (stdout by default). Returns the text."""
    text = render(records, meta, output.format)
    if output.path:
        directory = os.path.dirname(output.path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(output.path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info(f"wrote {len(records)} records as {output.format} to {output.path}")
    else:
        (stream or sys.stdout).write(text)
    return text
