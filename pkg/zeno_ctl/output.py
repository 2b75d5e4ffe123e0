"""
Write CSV tables and JSON reports to a file or to stdout.

Floats are written in their shortest round-trip form (repr) and a '.' decimal
separator regardless of locale; undefined values become "nan".

Copyright (c) 2026 Benjoe Vidal
Licensed under the MIT License.
"""

import csv
import json
import math
import sys
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, TextIO


def ensure_directory(path: str | Path) -> Path:
    """Create the directory (and parents) if it does not exist. Return Path."""
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def format_value(value: Any) -> str:
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, "__float__"):
        x = float(value)
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(value)


def _write_rows(handle: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} values, header has {len(header)}")
        writer.writerow([format_value(v) for v in row])
        count += 1
    return count


def write_csv(rows: Iterable[Sequence[Any]], header: Sequence[str],
              out: Optional[str | Path] = None, stream: Optional[TextIO] = None) -> int:
    """Write header + rows; to out if given, else to stream (default stdout). Returns row count."""
    if out is None:
        return _write_rows(stream or sys.stdout, header, rows)
    path = Path(out)
    ensure_directory(path.parent)
    with path.open("w", encoding="utf-8", newline="") as handle:
        return _write_rows(handle, header, rows)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if hasattr(value, "__float__"):
        x = float(value)
        return None if math.isnan(x) else x
    return str(value)


def write_json(report: dict, out: Optional[str | Path] = None, stream: Optional[TextIO] = None) -> None:
    text = json.dumps(_jsonable(report), indent=2, sort_keys=False) + "\n"
    if out is None:
        (stream or sys.stdout).write(text)
        return
    path = Path(out)
    ensure_directory(path.parent)
    path.write_text(text, encoding="utf-8", newline="\n")
