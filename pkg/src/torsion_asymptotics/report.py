"""Report rows with provenance, rendered as byte-deterministic JSON"""

from __future__ import annotations

import json
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import sympy

from .singularity import Germ

DECIMAL_DIGITS = 12


def _decimal(value: float) -> float:
    return float(f"{value:.{DECIMAL_DIGITS}g}")


def decimal_value(value: Any) -> Any:
    """12-digit approximation of an exact rational or a list of them, else None"""
    if isinstance(value, sympy.Rational):
        return _decimal(float(value))
    if isinstance(value, (list, tuple)) and value and all(isinstance(v, sympy.Rational) for v in value):
        return [_decimal(float(v)) for v in value]
    return None


def format_value(value: Any) -> Any:
    """Exact rationals become "p/q" strings, floats are rounded to 12 significant digits"""
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, sympy.Integer):
        return int(value)
    if isinstance(value, sympy.Rational):
        return f"{value.p}/{value.q}"
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return str(value)
        return _decimal(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [format_value(value.real), format_value(value.imag)]
    if isinstance(value, dict):
        return {str(k): format_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [format_value(v) for v in value]
    raise TypeError(f"cannot report a value of type {type(value).__name__}")


@dataclass(frozen=True)
class Quantity:
    value: Any
    source: str

    def to_dict(self) -> dict:
        """Exact values also carry a "decimal" approximation"""
        result = {"source": self.source, "value": format_value(self.value)}
        decimal = decimal_value(self.value)
        if decimal is not None:
            result["decimal"] = decimal
        return result


class Report:
    """Named quantities and tables for one subcommand"""

    def __init__(self, command: str):
        self.command = command
        self._quantities: dict[str, Quantity] = {}
        self._tables: dict[str, list[dict[str, Quantity]]] = {}
        self._notes: list[str] = []
        self.violations: list[str] = []

    def add(self, name: str, value: Any, source: str) -> None:
        self._quantities[name] = Quantity(value, source)

    def add_table(self, name: str, rows: list[dict[str, Quantity]]) -> None:
        self._tables[name] = rows

    def note(self, text: str) -> None:
        self._notes.append(text)

    def violation(self, text: str) -> None:
        """Record a failed identity; the command then exits with status 3"""
        self.violations.append(text)

    def value(self, name: str) -> Any:
        return self._quantities[name].value

    def table(self, name: str) -> list[dict[str, Quantity]]:
        return self._tables[name]

    def __contains__(self, name: str) -> bool:
        return name in self._quantities

    def to_dict(self) -> dict:
        result: dict[str, Any] = {"command": self.command}
        result.update({name: q.to_dict() for name, q in self._quantities.items()})
        for name, rows in self._tables.items():
            result[name] = [{key: q.to_dict() for key, q in row.items()} for row in rows]
        if self._notes:
            result["notes"] = list(self._notes)
        if self.violations:
            result["violations"] = list(self.violations)
        return result

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def write(self, path: Path | None = None) -> str:
        """Render, and save to `path` when given"""
        text = self.to_json()
        if path is not None:
            Path(path).write_text(text)
        return text


Column = tuple[str, Callable[[Germ], Any], str | Callable[[Germ], str]]


def germ_rows(germs: Iterable[Germ], columns: list[Column]) -> list[dict[str, Quantity]]:
    """One row per germ, each column given as (name, getter, source)"""
    rows = []
    for index, germ in enumerate(germs):
        row = {"index": Quantity(index, "input order"), "germ": Quantity(repr(germ), "input")}
        for name, getter, source in columns:
            row[name] = Quantity(getter(germ), source(germ) if callable(source) else source)
        rows.append(row)
    return rows
