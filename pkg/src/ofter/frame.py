"""Panel data model, CSV ingestion, lag construction, and rank hygiene."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TimePanel:
    """A T x d observation matrix with named columns and a monotone index.

    Values are immutable after construction: no missing entries, strictly
    increasing index, unique column names.
    """

    values: np.ndarray
    columns: tuple
    index: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2:
            raise ValueError("values must be a 2-d matrix")
        cols = tuple(str(c) for c in self.columns)
        idx = np.asarray(self.index)
        if len(cols) != vals.shape[1]:
            raise ValueError("column count does not match values")
        if idx.shape[0] != vals.shape[0]:
            raise ValueError("index length does not match values")
        if len(set(cols)) != len(cols):
            raise ValueError("column names must be unique")
        if not np.all(np.isfinite(vals)):
            raise ValueError("panel contains missing or non-finite entries")
        if idx.size > 1:
            pairs = zip(idx[:-1], idx[1:])
            if not all(a < b for a, b in pairs):
                raise ValueError("index must be strictly increasing")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "index", idx)

    @property
    def t_len(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]

    def select(self, mask) -> "TimePanel":
        """Panel restricted to the columns where ``mask`` is true."""
        mask = np.asarray(mask, dtype=bool)
        cols = tuple(c for c, keep in zip(self.columns, mask) if keep)
        return TimePanel(self.values[:, mask], cols, self.index)


@dataclass(frozen=True)
class StandardizationState:
    """Per-column centering/scaling statistics plus the surviving-column mask."""

    mean: np.ndarray
    scale: np.ndarray
    active: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))
        object.__setattr__(self, "scale", np.asarray(self.scale, dtype=float))
        object.__setattr__(self, "active", np.asarray(self.active, dtype=bool))
        if np.any(self.scale <= 0):
            raise ValueError("scales must be strictly positive")


def _parse_cell(text: str):
    try:
        return float(text)
    except ValueError:
        return None


def load_csv(path, has_header: bool | None = None, index_col: bool | None = None) -> TimePanel:
    """Read a comma-separated panel.

    ``has_header=None`` sniffs the first row (header if any cell is
    non-numeric while the second row parses).  ``index_col=None``
    auto-detects a leading index column: it is consumed when its cells are
    non-numeric (e.g. ISO dates), or when there is a header and the leading
    column holds strictly increasing integers.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: empty file")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: ragged rows (widths {sorted(widths)})")

    if has_header is None:
        # Header iff some cell of row 0 is non-numeric where row 1 is numeric;
        # a column that is non-numeric throughout (e.g. dates) is data.
        has_header = len(rows) > 1 and any(
            _parse_cell(a) is None and _parse_cell(b) is not None
            for a, b in zip(rows[0], rows[1])
        )
    if has_header:
        header = [c.strip() for c in rows[0]]
        body = rows[1:]
    else:
        header = None
        body = rows
    if not body:
        raise ValueError(f"{path}: no data rows")

    first_col = [r[0] for r in body]
    first_col_numeric = all(_parse_cell(c) is not None for c in first_col)
    if index_col is None:
        if not first_col_numeric:
            index_col = True
        elif has_header:
            ints = [_parse_cell(c) for c in first_col]
            is_int = all(v is not None and float(v).is_integer() for v in ints)
            increasing = all(a < b for a, b in zip(ints[:-1], ints[1:]))
            index_col = is_int and increasing
        else:
            index_col = False

    start = 1 if index_col else 0
    n_rows, n_cols = len(body), len(body[0]) - start
    if n_cols < 1:
        raise ValueError(f"{path}: no data columns")
    values = np.empty((n_rows, n_cols))
    for i, row in enumerate(body):
        for j, cell in enumerate(row[start:]):
            v = _parse_cell(cell)
            if v is None:
                where = f"row {i + 1}, column {j + 1 + start}"
                raise ValueError(f"{path}: non-numeric cell at {where}: {cell!r}")
            values[i, j] = v
    if np.any(np.isnan(values)):
        i, j = np.argwhere(np.isnan(values))[0]
        raise ValueError(f"{path}: missing value at row {i + 1}, column {j + 1 + start}")

    if index_col:
        if first_col_numeric:
            idx = np.array([int(float(c)) for c in first_col])
        else:
            idx = np.array(first_col)
    else:
        idx = np.arange(n_rows)
    if header is not None:
        columns = tuple(header[start:])
    else:
        columns = tuple(f"c{j}" for j in range(n_cols))
    return TimePanel(values, columns, idx)


def write_csv(panel: TimePanel, path, index_label: str = "t") -> None:
    """Write a panel with a header row and its index as the leading column."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([index_label, *panel.columns])
        for i in range(panel.t_len):
            writer.writerow([panel.index[i], *(repr(float(v)) for v in panel.values[i])])


def build_lagged_features(panel: TimePanel, max_lag: int) -> TimePanel:
    """Stack lag-0..max_lag copies of every column, dropping incomplete rows.

    Output columns are named ``<col>.lag<k>`` grouped by lag; row t of the
    lag-k block equals row t-k of the input.
    """
    if max_lag < 0:
        raise ValueError("max_lag must be non-negative")
    if max_lag >= panel.t_len:
        raise ValueError(f"max_lag={max_lag} leaves no complete rows (T={panel.t_len})")
    t_out = panel.t_len - max_lag
    blocks = []
    names = []
    for k in range(max_lag + 1):
        blocks.append(panel.values[max_lag - k : panel.t_len - k])
        names.extend(f"{c}.lag{k}" for c in panel.columns)
    return TimePanel(np.hstack(blocks), tuple(names), panel.index[max_lag:])


def prune_rank_deficient(panel: TimePanel, eps: float = 1e-8):
    """Drop columns that are (numerically) linear combinations of earlier ones.

    Columns are centered, then scanned left to right with an orthogonal
    factorization; a column whose residual against the kept basis has norm
    below ``eps`` is removed.  Returns the pruned panel and the keep mask.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    X = panel.values - panel.values.mean(axis=0)
    mask = np.zeros(panel.width, dtype=bool)
    basis = []
    for j in range(panel.width):
        r = X[:, j].copy()
        for q in basis:
            r -= (q @ r) * q
        for q in basis:  # second pass keeps the basis clean for near-ties
            r -= (q @ r) * q
        norm = np.linalg.norm(r)
        if norm >= eps:
            mask[j] = True
            basis.append(r / norm)
    if not mask.any():
        raise ValueError("all columns removed: input is degenerate at this tolerance")
    return panel.select(mask), mask


def standardize(panel: TimePanel, window) -> tuple:
    """Center and scale every column using statistics from ``window`` only.

    ``window`` is a (start, stop) row range (stop exclusive) or a slice.
    Scaling uses the sample standard deviation; the whole panel is
    transformed with the window statistics, so later rows involve no
    look-ahead.
    """
    if isinstance(window, slice):
        rows = panel.values[window]
    else:
        start, stop = window
        rows = panel.values[start:stop]
    if rows.shape[0] < 2:
        raise ValueError("standardization window must contain at least 2 rows")
    mean = rows.mean(axis=0)
    scale = rows.std(axis=0, ddof=1)
    dead = np.where(scale <= 0)[0]
    if dead.size:
        raise ValueError(f"constant column on the window: {panel.columns[dead[0]]!r}")
    out = TimePanel((panel.values - mean) / scale, panel.columns, panel.index)
    state = StandardizationState(mean, scale, np.ones(panel.width, dtype=bool))
    return out, state
