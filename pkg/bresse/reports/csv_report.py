# bresse/reports/csv_report.py

import csv
import io
import os
import tempfile
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from ..exceptions import ReportError
from ..utils.logging_utils import get_bresse_logger

logger = get_bresse_logger("reports")


def atomic_write_text(path: str, text: str) -> str:
    """
    Write text to path through a temporary file in the same directory.

    Readers never observe a half-written report.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.splitext(path)[1])
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    return path


def format_value(value) -> str:
    """Shortest round-trip text of a number; other values pass through str."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv_report(path: str, columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    """
    Write a header row and data rows atomically.

    Args:
        path: Target file
        columns: Column names
        rows: Row sequences, each as long as ``columns``

    Returns:
        The written path
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    count = 0
    for row in rows:
        if len(row) != len(columns):
            raise ReportError(f"row {count} has {len(row)} values for {len(columns)} columns")
        writer.writerow([format_value(v) for v in row])
        count += 1
    atomic_write_text(path, buffer.getvalue())
    logger.debug(f"Wrote {count} rows to {path}")
    return path


def read_csv_report(path: str, required: Optional[Sequence[str]] = None) -> Dict[str, np.ndarray]:
    """
    Read a numeric CSV report into one float array per column.

    Raises:
        ReportError: file missing, empty, non-numeric, or lacking a required column
    """
    if not os.path.exists(path):
        raise ReportError(f"report {path} does not exist")
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ReportError(f"report {path} has no header row")
        rows: List[List[str]] = [row for row in reader if row]

    missing = [name for name in (required or ()) if name not in header]
    if missing:
        raise ReportError(f"report {path} lacks columns {missing} (has {header})")

    columns: Dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        try:
            columns[name] = np.array([float(row[j]) for row in rows], dtype=float)
        except (ValueError, IndexError) as e:
            raise ReportError(f"column '{name}' of {path} is not numeric: {e}") from e
    return columns
