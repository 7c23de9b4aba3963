"""
Reporting Module
Deterministic JSON output and pandas-rendered text tables for CLI reports.
"""

import json
import math
from typing import Any, Iterable, Mapping

import numpy as np
import pandas as pd


def format_float(value: float) -> str:
    """
    Format a float with 17 significant digits as a JSON number.

    Args:
        value: Finite float

    Returns:
        JSON number literal
    """
    if not math.isfinite(value):
        raise ValueError(f"Cannot serialize non-finite float {value!r} as JSON")
    return format(value, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """
    Serialize a report to JSON with a byte-stable layout.

    Dict keys keep their insertion order, floats use 17 significant digits,
    numpy scalars and arrays are converted to Python values.

    Args:
        obj: Nested dict/list/scalar structure
        indent: Spaces per nesting level

    Returns:
        JSON text
    """
    pad = " " * (indent * (_level + 1))
    end_pad = " " * (indent * _level)

    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, np.generic):
        obj = obj.item()

    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(key))}: {dumps(value, indent, _level + 1)}"
            for key, value in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + end_pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # Leaf rows (numbers only) stay on one line
        if all(isinstance(v, (int, float, np.generic)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [f"{pad}{dumps(value, indent, _level + 1)}" for value in obj]
        return "[\n" + ",\n".join(items) + "\n" + end_pad + "]"
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def render_table(rows: Iterable[Mapping[str, Any]], float_format: str = "{:.3e}") -> str:
    """
    Render rows as an aligned text table.

    Args:
        rows: Row dictionaries sharing the same keys
        float_format: Format applied to float columns

    Returns:
        Table text (empty string for no rows)
    """
    df = pd.DataFrame(list(rows))
    if df.empty:
        return ""
    return df.to_string(index=False, float_format=float_format.format)
