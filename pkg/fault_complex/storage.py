"""
Output files. Every write goes to a temp file in the target directory
and is moved into place with ``os.replace``.
"""

import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Union

from .errors import SpecError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def atomic_write_text(path: PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug(f"Wrote {path}")


def atomic_write_json(path: PathLike, data: Any) -> None:
    atomic_write_text(path, json.dumps(data, indent=2) + "\n")


def format_value(value: Any) -> str:
    """Shortest round-trip text for floats, str() for everything else."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def read_csv_rows(path: PathLike) -> List[Dict[str, str]]:
    path = Path(path)
    if not path.exists():
        raise SpecError(f"CSV file not found: {path}")
    with path.open(newline="") as f:
        return list(csv.DictReader(f))


def write_csv_rows(path: PathLike, columns: Sequence[str],
                   rows: Sequence[Mapping[str, Any]], append: bool = False) -> None:
    """Write rows with a mandatory header; ``append`` keeps existing rows."""
    path = Path(path)
    existing: List[Dict[str, str]] = []
    if append and path.exists():
        with path.open(newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames and list(reader.fieldnames) != list(columns):
                raise SpecError(f"{path} has columns {reader.fieldnames}, expected {list(columns)}")
            existing = list(reader)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in existing:
        writer.writerow([row[c] for c in columns])
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])
    atomic_write_text(path, buffer.getvalue())
