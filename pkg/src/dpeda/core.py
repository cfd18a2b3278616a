"""Schema-typed tabular data: declaration, ingestion, and missing-value tooling.

A column is either numeric with public bounds [lower, upper] or categorical
with a public, finite domain. Bounds and domains are analyst-declared metadata
and are treated as public knowledge; they are never derived from the data.
Privacy-relevant consequences (noise scales, histogram layouts) key off this
metadata only.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from dpeda.errors import (
    DomainError,
    InsufficientData,
    KindError,
    NotFound,
    ParamError,
    ParseError,
    SchemaMismatch,
)

NUMERIC = "numeric"
CATEGORICAL = "categorical"

# Virtual histogram cell for absent values; appended after the declared domain.
MISSING_LABEL = "(missing)"


# ==== schema ====


@dataclass(frozen=True)
class ColumnSpec:
    """Declaration of one column: name, kind, and public metadata."""

    name: str
    kind: str
    bounds: tuple[float, float] | None = None
    domain: tuple[str, ...] | None = None
    missing_tokens: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ParamError("column name must be non-empty")
        if self.kind == NUMERIC:
            if self.bounds is None:
                raise ParamError(f"numeric column {self.name!r} needs bounds")
            lower, upper = self.bounds
            if not (math.isfinite(lower) and math.isfinite(upper)):
                raise ParamError(f"bounds of {self.name!r} must be finite")
            if lower >= upper:
                raise ParamError(f"bounds of {self.name!r} must satisfy lower < upper")
            if self.domain is not None:
                raise ParamError(f"numeric column {self.name!r} cannot have a domain")
            object.__setattr__(self, "bounds", (float(lower), float(upper)))
        elif self.kind == CATEGORICAL:
            if not self.domain:
                raise ParamError(f"categorical column {self.name!r} needs a domain")
            if self.bounds is not None:
                raise ParamError(f"categorical column {self.name!r} cannot have bounds")
            if len(set(self.domain)) != len(self.domain):
                raise ParamError(f"domain of {self.name!r} has duplicates")
            if MISSING_LABEL in self.domain:
                raise ParamError(f"{MISSING_LABEL!r} is reserved and cannot be a level")
            object.__setattr__(self, "domain", tuple(self.domain))
        else:
            raise ParamError(f"unknown column kind {self.kind!r}")
        object.__setattr__(self, "missing_tokens", tuple(self.missing_tokens))

    @property
    def width(self) -> float:
        """upper - lower; the Laplace sensitivity of location statistics."""
        if self.bounds is None:
            raise KindError(f"{self.name!r} is not numeric")
        return self.bounds[1] - self.bounds[0]


@dataclass(frozen=True)
class Schema:
    """Ordered, immutable collection of column declarations."""

    columns: tuple[ColumnSpec, ...]
    _by_name: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ParamError("duplicate column names in schema")
        object.__setattr__(self, "_by_name", {c.name: c for c in self.columns})

    def column(self, name: str) -> ColumnSpec:
        try:
            return self._by_name[name]
        except KeyError:
            raise NotFound(f"no column {name!r} in schema") from None

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @property
    def numeric_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns if c.kind == NUMERIC)

    @property
    def categorical_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns if c.kind == CATEGORICAL)

    def to_json(self) -> str:
        cols = []
        for c in self.columns:
            entry: dict = {"name": c.name, "kind": c.kind}
            if c.kind == NUMERIC:
                entry["bounds"] = list(c.bounds)
            else:
                entry["domain"] = list(c.domain)
            if c.missing_tokens:
                entry["missing_tokens"] = list(c.missing_tokens)
            cols.append(entry)
        return json.dumps({"columns": cols}, indent=2)

    @staticmethod
    def from_json(text: str) -> "Schema":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"schema file is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict) or "columns" not in doc:
            raise SchemaMismatch("schema document must have a 'columns' list")
        cols = []
        for entry in doc["columns"]:
            cols.append(
                ColumnSpec(
                    name=entry["name"],
                    kind=entry["kind"],
                    bounds=tuple(entry["bounds"]) if "bounds" in entry else None,
                    domain=tuple(entry["domain"]) if "domain" in entry else None,
                    missing_tokens=tuple(entry.get("missing_tokens", ())),
                )
            )
        return Schema(tuple(cols))


def load_schema(path: str | Path) -> Schema:
    return Schema.from_json(Path(path).read_text(encoding="utf-8"))


# ==== dataset ====


class Dataset:
    """Immutable column store; missing cells are None.

    Numeric cells are floats already clamped into the declared bounds;
    categorical cells are members of the declared domain.
    """

    def __init__(self, schema: Schema, columns: dict[str, Sequence]):
        if set(columns) != set(schema.names):
            raise SchemaMismatch("column data does not match schema names")
        lengths = {len(v) for v in columns.values()}
        if len(lengths) > 1:
            raise SchemaMismatch(f"ragged columns: lengths {sorted(lengths)}")
        self._schema = schema
        self._columns = {name: tuple(columns[name]) for name in schema.names}
        self._num_rows = lengths.pop() if lengths else 0

    @property
    def schema(self) -> Schema:
        return self._schema

    @property
    def num_rows(self) -> int:
        return self._num_rows

    def column_values(self, name: str) -> tuple:
        self._schema.column(name)
        return self._columns[name]

    def present_numeric(self, name: str) -> np.ndarray:
        """Float array of the present (non-missing) cells of a numeric column."""
        spec = self._schema.column(name)
        if spec.kind != NUMERIC:
            raise KindError(f"{name!r} is categorical, not numeric")
        return np.asarray(
            [v for v in self._columns[name] if v is not None], dtype=float
        )

    def missing_in(self, name: str) -> int:
        return sum(1 for v in self.column_values(name) if v is None)

    def category_counts(self, name: str) -> dict[str, int]:
        """Counts over the declared domain plus the missing cell, all levels present."""
        spec = self._schema.column(name)
        if spec.kind != CATEGORICAL:
            raise KindError(f"{name!r} is numeric, not categorical")
        counts = {level: 0 for level in spec.domain}
        counts[MISSING_LABEL] = 0
        for v in self._columns[name]:
            counts[MISSING_LABEL if v is None else v] += 1
        return counts

    def replace_column(self, name: str, values: Sequence) -> "Dataset":
        cols = dict(self._columns)
        cols[name] = tuple(values)
        return Dataset(self._schema, cols)

    def iter_rows(self) -> Iterable[tuple]:
        series = [self._columns[n] for n in self._schema.names]
        return zip(*series) if series else iter(())

    def to_csv(self, target: str | Path | io.TextIOBase) -> None:
        """Write in the same comma-separated shape `load_dataset` ingests.

        Missing cells become the column's first declared missing token, or the
        empty string when none is declared (empty cells always re-read as
        missing).
        """
        owned = isinstance(target, (str, Path))
        handle = open(target, "w", encoding="utf-8", newline="") if owned else target
        try:
            writer = csv.writer(handle)
            writer.writerow(self._schema.names)
            markers = {
                c.name: (c.missing_tokens[0] if c.missing_tokens else "")
                for c in self._schema.columns
            }
            for row in self.iter_rows():
                out = []
                for spec, cell in zip(self._schema.columns, row):
                    if cell is None:
                        out.append(markers[spec.name])
                    elif spec.kind == NUMERIC:
                        out.append(repr(float(cell)))
                    else:
                        out.append(cell)
                writer.writerow(out)
        finally:
            if owned:
                handle.close()


# ==== ingestion ====


def clamp_numeric(value: float, bounds: tuple[float, float]) -> float:
    """Project a value into [lower, upper]. Idempotent."""
    lower, upper = bounds
    if lower > upper:
        raise ParamError("bounds must satisfy lower <= upper")
    return min(max(float(value), lower), upper)


def load_dataset(
    source: str | Path | io.TextIOBase,
    schema: Schema,
    policy: str = "strict",
) -> Dataset:
    """Read a comma-separated UTF-8 file with one header row into a Dataset.

    policy='strict' raises ParseError/DomainError on the first bad cell
    (row numbers are 1-based data rows, header excluded); policy='coerce'
    turns unparseable or out-of-domain cells into missing. Cells equal to a
    declared missing token, or empty, are missing under both policies.
    Numeric cells are clamped into the declared bounds.
    """
    if policy not in ("strict", "coerce"):
        raise ParamError(f"unknown ingestion policy {policy!r}")
    owned = isinstance(source, (str, Path))
    handle = open(source, "r", encoding="utf-8", newline="") if owned else source
    try:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch("file has no header row") from None
        header = [h.strip() for h in header]
        if sorted(header) != sorted(schema.names):
            raise SchemaMismatch(
                f"header {header!r} does not match schema columns {list(schema.names)!r}"
            )
        positions = {name: header.index(name) for name in schema.names}
        columns: dict[str, list] = {name: [] for name in schema.names}
        for row_number, raw in enumerate(reader, start=1):
            if len(raw) != len(header):
                if policy == "strict":
                    raise ParseError(row_number, "<row>", ",".join(raw))
                continue
            for spec in schema.columns:
                cell = raw[positions[spec.name]].strip()
                columns[spec.name].append(
                    _parse_cell(cell, spec, policy, row_number)
                )
        return Dataset(schema, columns)
    finally:
        if owned:
            handle.close()


def _parse_cell(cell: str, spec: ColumnSpec, policy: str, row_number: int):
    if cell == "" or cell in spec.missing_tokens:
        return None
    if spec.kind == NUMERIC:
        try:
            value = float(cell)
        except ValueError:
            if policy == "strict":
                raise ParseError(row_number, spec.name, cell) from None
            return None
        if math.isnan(value):
            if policy == "strict":
                raise ParseError(row_number, spec.name, cell)
            return None
        return clamp_numeric(value, spec.bounds)
    if cell not in spec.domain:
        if policy == "strict":
            raise DomainError(row_number, spec.name, cell)
        return None
    return cell


# ==== missing-value injection ====


def inject_missing(ds: Dataset, column: str, fraction, seed: int) -> Dataset:
    """Replace round(fraction * num_rows) present cells of a numeric column by missing.

    Rounding is half-up on the exact decimal value. The cells to blank are
    drawn uniformly without replacement from the present cells under the given
    seed, so the same seed always blanks the same positions.
    """
    spec = ds.schema.column(column)
    if spec.kind != NUMERIC:
        raise KindError(f"inject_missing targets numeric columns, {column!r} is not")
    frac = Fraction(str(fraction))
    if frac < 0 or frac > 1:
        raise ParamError("fraction must lie in [0, 1]")
    wanted = int(frac * ds.num_rows + Fraction(1, 2))
    values = list(ds.column_values(column))
    present_idx = [i for i, v in enumerate(values) if v is not None]
    if wanted > len(present_idx):
        raise InsufficientData(
            f"need {wanted} present cells in {column!r}, have {len(present_idx)}"
        )
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(present_idx), size=wanted, replace=False)
    for offset in chosen:
        values[present_idx[int(offset)]] = None
    return ds.replace_column(column, values)
