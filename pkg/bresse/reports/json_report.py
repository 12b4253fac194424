# bresse/reports/json_report.py

import json
import math
import os
from typing import Any

import numpy as np

from ..exceptions import ReportError
from .csv_report import atomic_write_text


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become "inf", "-inf" or "nan"."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    return value


def write_json_report(path: str, payload: dict) -> str:
    """Write payload as sorted, indented JSON through a temporary file."""
    text = json.dumps(to_jsonable(payload), sort_keys=True, indent=2, allow_nan=False)
    return atomic_write_text(path, text + "\n")


def read_json_report(path: str) -> dict:
    if not os.path.exists(path):
        raise ReportError(f"report {path} does not exist")
    with open(path, "r", encoding="utf-8") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as e:
            raise ReportError(f"report {path} is not valid JSON: {e}") from e
