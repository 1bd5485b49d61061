"""
Atomic file output: write to a temporary sibling, then rename into place.
"""

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence


def atomic_write_bytes(path: Path, payload: bytes) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(handle, "wb") as stream:
            stream.write(payload)
        os.replace(temp_name, target)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise
    return target


def atomic_write_text(path: Path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def format_number(value: Optional[Any]) -> str:
    """Shortest round-trip decimal for floats; empty for missing values."""
    if value is None:
        return ""
    if hasattr(value, "item"):
        # numpy scalars; np.float64 would otherwise repr with its type name
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(value) for value in row])
    return atomic_write_text(path, buffer.getvalue())


def write_json(path: Path, payload: Any) -> Path:
    return atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
