"""Tabular data loading and typing.

A dataset is an immutable, column-oriented table. Columns are either
continuous (every cell parses as a finite real) or categorical (finite
value set taken from the data). The response column must be continuous.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum


class DatasetError(ValueError):
    """Structural or typing problem in the input data."""


class ColumnKind(Enum):
    CONTINUOUS = "continuous"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class Column:
    name: str
    kind: ColumnKind | None  # None until infer_kinds has run
    values: tuple
    # continuous metadata
    minimum: float | None = None
    maximum: float | None = None
    # categorical metadata: sorted distinct values
    categories: tuple[str, ...] = ()


@dataclass(frozen=True)
class Dataset:
    columns: tuple[Column, ...]
    n: int
    target: str | None = None

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DatasetError("duplicate column names: %r" % names)
        for c in self.columns:
            if not c.name:
                raise DatasetError("empty column name")
            if len(c.values) != self.n:
                raise DatasetError(
                    "column %r has %d values, expected %d" % (c.name, len(c.values), self.n)
                )

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise DatasetError("unknown column: %r" % name)

    def record(self, i: int) -> dict:
        return {c.name: c.values[i] for c in self.columns}


def _parse_number(cell: str) -> float | None:
    """Parse a cell as a finite real (decimal or scientific notation only)."""
    s = cell.strip()
    if not s:
        return None
    # reject locale separators and other float() extensions
    if any(ch in s for ch in (",", "_")) or s.lower() in ("nan", "inf", "-inf", "+inf", "infinity"):
        return None
    try:
        v = float(s)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def load_csv(source, delimiter: str = ",", has_header: bool = True) -> Dataset:
    """Read an RFC-4180 CSV byte/text stream into an untyped Dataset.

    All cells stay raw strings; run infer_kinds afterwards. Ragged rows,
    empty input, and duplicate header names are hard errors.
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        source = io.StringIO(source)
    elif hasattr(source, "read") and isinstance(source.read(0), bytes):
        source = io.TextIOWrapper(source, encoding="utf-8")

    reader = csv.reader(source, delimiter=delimiter)
    rows = [row for row in reader if row]
    if not rows:
        raise DatasetError("empty CSV input")

    if has_header:
        header = [h.strip() for h in rows[0]]
        data_rows = rows[1:]
    else:
        header = ["col%d" % (i + 1) for i in range(len(rows[0]))]
        data_rows = rows
    if len(set(header)) != len(header):
        raise DatasetError("duplicate header names: %r" % header)

    width = len(header)
    for idx, row in enumerate(data_rows):
        if len(row) != width:
            raise DatasetError(
                "ragged row at data row %d: expected %d cells, got %d" % (idx, width, len(row))
            )

    columns = tuple(
        Column(name=header[j], kind=None, values=tuple(row[j] for row in data_rows))
        for j in range(width)
    )
    return Dataset(columns=columns, n=len(data_rows))


def infer_kinds(ds: Dataset) -> Dataset:
    """Type each column: continuous iff every cell parses as a finite real.

    Empty cells are a hard error (no imputation); mixed columns fall back
    to categorical.
    """
    typed = []
    for col in ds.columns:
        empties = [i for i, v in enumerate(col.values) if not str(v).strip()]
        if empties:
            raise DatasetError(
                "column %r has empty cells at rows %r" % (col.name, empties[:20])
            )
        parsed = [_parse_number(str(v)) for v in col.values]
        if all(p is not None for p in parsed):
            typed.append(
                Column(
                    name=col.name,
                    kind=ColumnKind.CONTINUOUS,
                    values=tuple(parsed),
                    minimum=min(parsed),
                    maximum=max(parsed),
                )
            )
        else:
            values = tuple(str(v).strip() for v in col.values)
            typed.append(
                Column(
                    name=col.name,
                    kind=ColumnKind.CATEGORICAL,
                    values=values,
                    categories=tuple(sorted(set(values))),
                )
            )
    return Dataset(columns=tuple(typed), n=ds.n, target=ds.target)


def split_target(ds: Dataset, target: str) -> tuple[Dataset, tuple[float, ...]]:
    """Designate the response column; returns (X view without target, y)."""
    col = ds.column(target)
    if col.kind is not ColumnKind.CONTINUOUS:
        raise DatasetError("target column %r must be continuous" % target)
    rest = tuple(c for c in ds.columns if c.name != target)
    x_view = Dataset(columns=rest, n=ds.n, target=None)
    return x_view, col.values


def with_target(ds: Dataset, target: str) -> Dataset:
    """Return the dataset with the target designated (validated)."""
    split_target(ds, target)
    return Dataset(columns=ds.columns, n=ds.n, target=target)


def serialize_csv(ds: Dataset, delimiter: str = ",") -> str:
    """Write the dataset back out as RFC-4180 CSV with a header row."""
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(ds.column_names)
    for i in range(ds.n):
        writer.writerow([_format_cell(c.values[i]) for c in ds.columns])
    return buf.getvalue()


def _format_cell(v) -> str:
    if isinstance(v, float):
        return repr(v) if v != int(v) else str(int(v))
    return str(v)
