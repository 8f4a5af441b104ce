"""Deterministic CSV / JSON / text rendering.

Floats are always written with 12 significant digits in scientific notation,
so identical runs produce byte-identical files.
"""

from __future__ import annotations

import math
from typing import Any, Dict, List


def fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.11e}"


def _json_scalar(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        # JSON has no inf/nan literals
        return fmt(value) if math.isfinite(value) else f'"{fmt(value)}"'
    s = str(value).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def to_json(value: Any, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f'{pad}{_json_scalar(str(k))}: {to_json(v, indent + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in value):
            return "[" + ", ".join(_json_scalar(v) for v in value) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent + 1) for v in value) + "\n" + end + "]"
    if hasattr(value, "item"):
        value = value.item()
    return _json_scalar(value)


def csv_metadata(meta: Dict[str, Any]) -> List[str]:
    lines = []
    for key, value in meta.items():
        if isinstance(value, float):
            value = fmt(value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"# {key}={value}")
    return lines


def csv_rows(header: List[str], rows: List[List[Any]]) -> List[str]:
    out = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, bool):
                cells.append("true" if v else "false")
            elif isinstance(v, float):
                cells.append(fmt(v))
            else:
                cells.append(str(v))
        out.append(",".join(cells))
    return out
