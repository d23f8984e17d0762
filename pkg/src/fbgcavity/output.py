"""Deterministic CSV / JSON emission of result tables."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


@dataclass
class Table:
    """Named columns with units, rows of values, and run parameters.

    ``notes`` carries free-form diagnostics, e.g. why a value is missing.
    """

    columns: list[tuple[str, str]]
    rows: list[list] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    title: str = ""

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, table has {len(self.columns)} columns")
        self.rows.append(list(values))


def _fmt(value, precision: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return ""
        return f"{value:.{precision}g}"
    return str(value)


def _jsonable(value, precision: int):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return float(f"{value:.{precision}g}") if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _jsonable(v, precision) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v, precision) for v in value]
    if hasattr(value, "item"):
        return _jsonable(value.item(), precision)
    return str(value)


def to_csv(table: Table, precision: int = 9) -> str:
    lines = []
    if table.title:
        lines.append(f"# {table.title}")
    for k, v in table.params.items():
        lines.append(f"# {k} = {_fmt(_jsonable(v, precision), precision)}")
    for k, v in table.notes.items():
        lines.append(f"# note {k}: {_fmt(_jsonable(v, precision), precision)}")
    lines.append("# units: " + ", ".join(f"{n} [{u}]" for n, u in table.columns))
    lines.append(",".join(n for n, _ in table.columns))
    for row in table.rows:
        lines.append(",".join(_fmt(_jsonable(v, precision), precision) for v in row))
    return "\n".join(lines) + "\n"


def to_json(table: Table, precision: int = 9) -> str:
    obj = {"params": _jsonable(table.params, precision),
           "columns": [{"name": n, "unit": u} for n, u in table.columns],
           "rows": _jsonable(table.rows, precision)}
    if table.title:
        obj = {"title": table.title, **obj}
    if table.notes:
        obj["notes"] = _jsonable(table.notes, precision)
    return json.dumps(obj, indent=2) + "\n"


def render(table: Table, fmt: str, precision: int = 9) -> str:
    if fmt == "csv":
        return to_csv(table, precision)
    if fmt == "json":
        return to_json(table, precision)
    raise ValueError(f"unknown output format {fmt!r}")
