"""Configuration matrices: typed columns of product configurations.

A matrix is a set of configurations (rows) over named variables (columns).
Cells are natural numbers or non-empty text; each column is homogeneously
typed.  Internally every column stores its distinct values (the domain, in
first-occurrence order) plus an int32 code vector, which is what the hot
kernels operate on.
"""

from __future__ import annotations

import csv
import io
import re
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateRow,
    DuplicateVariable,
    EmptyCell,
    EmptyMatrix,
    IndexOutOfRange,
    MixedTypeColumn,
    RaggedRow,
)

# A cell is a natural number or a non-empty text token.
CellValue = int | str

_NATURAL = re.compile(r"^[0-9]+$")


def is_natural(text: str) -> bool:
    return bool(_NATURAL.match(text))


@dataclass
class Column:
    """One variable: its name, domain (first-occurrence order) and row codes."""

    name: str
    numeric: bool
    values: list
    codes: np.ndarray  # int32, one code per row, indexes into `values`

    def __post_init__(self):
        self._code_of = {v: i for i, v in enumerate(self.values)}

    @property
    def domain_size(self) -> int:
        return len(self.values)

    def code_of(self, value):
        return self._code_of.get(value)

    def cell(self, k: int):
        return self.values[self.codes[k]]


class ConfigurationMatrix:
    """M x N grid of typed cells; rows are distinct configurations."""

    def __init__(self, columns: list[Column], duplicates_dropped: int = 0):
        if not columns:
            raise EmptyMatrix("matrix has no variable columns")
        n_rows = len(columns[0].codes)
        if n_rows == 0:
            raise EmptyMatrix("matrix has no configurations")
        for col in columns:
            if len(col.codes) != n_rows:
                raise RaggedRow(f"column {col.name!r} has {len(col.codes)} cells, expected {n_rows}")
        names = [c.name for c in columns]
        if len(set(names)) != len(names):
            raise DuplicateVariable("duplicate variable names in header")
        self.columns = columns
        self.n_rows = n_rows
        self._by_name = {c.name: j for j, c in enumerate(columns)}
        self.duplicates_dropped = duplicates_dropped
        self._codes_t = None

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    @property
    def variables(self) -> list[str]:
        return [c.name for c in self.columns]

    def column_index(self, name: str) -> int:
        try:
            return self._by_name[name]
        except KeyError:
            raise IndexOutOfRange(f"no column named {name!r}") from None

    def column(self, j) -> Column:
        if isinstance(j, str):
            j = self.column_index(j)
        if not 0 <= j < self.n_cols:
            raise IndexOutOfRange(f"column index {j} out of range 0..{self.n_cols - 1}")
        return self.columns[j]

    def cell(self, k: int, j: int):
        return self.columns[j].cell(k)

    def row(self, k: int) -> tuple:
        return tuple(col.cell(k) for col in self.columns)

    def codes_t(self) -> np.ndarray:
        """(N, M) int32 code matrix, cached; the kernel input layout."""
        if self._codes_t is None:
            self._codes_t = np.ascontiguousarray(
                np.stack([c.codes for c in self.columns], axis=0).astype(np.int32)
            )
        return self._codes_t

    def domain_sizes(self) -> np.ndarray:
        return np.array([c.domain_size for c in self.columns], dtype=np.int32)

    def drop_columns(self, names) -> "ConfigurationMatrix":
        drop = set(names)
        kept = [c for c in self.columns if c.name not in drop]
        return ConfigurationMatrix(kept, self.duplicates_dropped)

    def to_csv_text(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(self.variables)
        for k in range(self.n_rows):
            w.writerow([str(v) for v in self.row(k)])
        return out.getvalue()


@dataclass
class IngestionHints:
    """Parse-time knobs: columns to exclude and duplicate-row policy."""

    identifier_columns: set = field(default_factory=set)
    drop_duplicates: bool = False


def _build_column(name: str, cells: list[str]) -> Column:
    numeric_flags = [is_natural(c) for c in cells]
    if all(numeric_flags):
        typed = [int(c) for c in cells]
        numeric = True
    elif not any(numeric_flags):
        typed = cells
        numeric = False
    else:
        raise MixedTypeColumn(f"column {name!r} mixes natural numbers and text")
    values, code_of = [], {}
    codes = np.empty(len(typed), dtype=np.int32)
    for k, v in enumerate(typed):
        c = code_of.get(v)
        if c is None:
            c = code_of[v] = len(values)
            values.append(v)
        codes[k] = c
    return Column(name, numeric, values, codes)


def parse_matrix(csv_text: str, hints: IngestionHints | None = None) -> ConfigurationMatrix:
    """Parse an RFC-4180 CSV into a configuration matrix.

    The first row names the variables.  Identifier columns named in the
    hints are excluded before duplicate detection, because two rows that
    differ only in an identifier describe the same configuration.
    """
    hints = hints or IngestionHints()
    reader = csv.reader(io.StringIO(csv_text))
    rows = [r for r in reader if r]
    if not rows:
        raise EmptyMatrix("no header row")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise DuplicateVariable("duplicate variable names in header")
    data = rows[1:]
    if not data:
        raise EmptyMatrix("no data rows")
    n = len(header)
    for k, r in enumerate(data):
        if len(r) != n:
            raise RaggedRow(f"row {k + 1} has {len(r)} cells, expected {n}")

    keep = [j for j, name in enumerate(header) if name not in hints.identifier_columns]
    if not keep:
        raise EmptyMatrix("all columns are identifiers")

    cells = []
    for r in data:
        row = []
        for j in keep:
            c = r[j].strip()
            if c == "":
                raise EmptyCell(f"empty cell in column {header[j]!r}; use an explicit null token")
            row.append(c)
        cells.append(tuple(row))

    seen = {}
    kept_rows, dropped = [], 0
    for k, row in enumerate(cells):
        if row in seen:
            if hints.drop_duplicates:
                dropped += 1
                continue
            raise DuplicateRow(f"rows {seen[row] + 1} and {k + 1} are identical configurations")
        seen[row] = k
        kept_rows.append(row)
    if dropped:
        warnings.warn(f"dropped {dropped} duplicate configuration(s)", stacklevel=2)

    columns = [
        _build_column(header[j], [row[i] for row in kept_rows])
        for i, j in enumerate(keep)
    ]
    return ConfigurationMatrix(columns, duplicates_dropped=dropped)


def matrix_from_codes(names, numeric_flags, value_lists, codes_rows,
                      duplicates_dropped: int = 0) -> ConfigurationMatrix:
    """Assemble a matrix directly from per-column code vectors (generator fast path)."""
    columns = []
    for j, name in enumerate(names):
        columns.append(Column(name, numeric_flags[j], list(value_lists[j]),
                              np.asarray(codes_rows[j], dtype=np.int32)))
    return ConfigurationMatrix(columns, duplicates_dropped)


def column_domain(matrix: ConfigurationMatrix, j) -> list:
    """Distinct values of a column, in first-occurrence order."""
    return list(matrix.column(j).values)
