"""Tabular scan results and their CSV / JSON serialization.

CSV files start with ``#``-prefixed metadata lines (``# key: <json>``),
followed by a header row and comma-separated values. Floats are written
with 12 significant digits so identical inputs give byte-identical files.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

__all__ = ["ScanTable", "format_number", "read_table"]

FLOAT_FORMAT = ".12g"


def format_number(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, FLOAT_FORMAT)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


@dataclass
class ScanTable:
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)
    errors: list[dict[str, Any]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add_row(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, table has {len(self.columns)} columns")
        self.rows.append(tuple(values))

    def add_error(self, key, message: str) -> None:
        self.errors.append({self.columns[0]: key, "message": message})

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def __len__(self) -> int:
        return len(self.rows)

    # -- serialization --------------------------------------------------

    def to_csv(self) -> str:
        out = io.StringIO()
        for key, value in self.metadata.items():
            out.write(f"# {key}: {json.dumps(value, sort_keys=True, default=str)}\n")
        for err in self.errors:
            out.write(f"# error: {json.dumps(err, sort_keys=True)}\n")
        for note in self.notes:
            out.write(f"# note: {note}\n")
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(format_number(v) for v in row) + "\n")
        return out.getvalue()

    def to_dict(self) -> dict:
        return {
            "config": self.metadata,
            "columns": list(self.columns),
            "rows": [[_jsonable(v) for v in row] for row in self.rows],
            "errors": self.errors,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str) + "\n"

    def write(self, path: str | Path, fmt: str | None = None) -> Path:
        path = Path(path)
        fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
        text = self.to_json() if fmt == "json" else self.to_csv()
        path.write_text(text, encoding="utf-8")
        return path

    @classmethod
    def from_json(cls, text: str) -> "ScanTable":
        d = json.loads(text)
        rows = [tuple(math.nan if v is None else v for v in r) for r in d["rows"]]
        return cls(list(d["columns"]), rows, dict(d.get("config", {})),
                   list(d.get("errors", [])), list(d.get("notes", [])))

    @classmethod
    def from_csv(cls, text: str) -> "ScanTable":
        metadata: dict[str, Any] = {}
        errors, notes = [], []
        lines = text.splitlines()
        i = 0
        while i < len(lines) and lines[i].startswith("#"):
            key, _, value = lines[i][1:].strip().partition(": ")
            if key == "error":
                errors.append(json.loads(value))
            elif key == "note":
                notes.append(value)
            else:
                metadata[key] = json.loads(value)
            i += 1
        columns = lines[i].split(",")
        rows = [tuple(float(v) for v in line.split(",")) for line in lines[i + 1:] if line]
        return cls(columns, rows, metadata, errors, notes)


def read_table(path: str | Path) -> ScanTable:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return ScanTable.from_json(text)
    return ScanTable.from_csv(text)
