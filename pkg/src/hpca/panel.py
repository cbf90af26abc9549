"""Return-panel loading, validation, standardization, and correlation.

A panel is a T x n matrix of per-period arithmetic returns with date labels
on rows and asset identifiers on columns. Returns are taken as given; any
price-to-return or log/arithmetic conversion is the caller's job.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .errors import InputError

# Cell contents treated as a missing observation (case-insensitive).
MISSING_TOKENS = frozenset({"", "na", "nan", "null", "n/a"})

STANDARDIZE_TOL = 1e-12


@dataclass
class ReturnsPanel:
    """Complete return panel: T dates, n assets, no missing values."""

    dates: tuple[str, ...]
    assets: tuple[str, ...]
    values: np.ndarray
    dropped_rows: int = 0

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise InputError(f"panel values must be 2-d, got {self.values.ndim}-d")
        t, n = self.values.shape
        if len(self.dates) != t or len(self.assets) != n:
            raise InputError(
                f"label/value shape mismatch: {len(self.dates)} dates, "
                f"{len(self.assets)} assets, values {self.values.shape}"
            )
        if t < 2:
            raise InputError(f"panel needs at least 2 rows, got {t}")
        if n < 1:
            raise InputError("panel needs at least 1 asset column")
        if len(set(self.assets)) != n:
            dupes = sorted({a for a in self.assets if self.assets.count(a) > 1})
            raise InputError(f"duplicate asset names: {', '.join(dupes)}")
        if not np.isfinite(self.values).all():
            raise InputError("panel contains missing or non-finite values")

    @property
    def n_periods(self) -> int:
        return self.values.shape[0]

    @property
    def n_assets(self) -> int:
        return self.values.shape[1]


@dataclass
class StandardizedPanel(ReturnsPanel):
    """Panel whose columns each have sample mean 0 and sample stdev 1."""

    def __post_init__(self) -> None:
        super().__post_init__()
        means = self.values.mean(axis=0)
        stds = self.values.std(axis=0, ddof=1)
        if np.abs(means).max() > STANDARDIZE_TOL:
            raise InputError(
                f"column means not zero: max |mean| = {np.abs(means).max():g}"
            )
        if np.abs(stds - 1.0).max() > STANDARDIZE_TOL:
            raise InputError(
                f"column stdevs not one: max |stdev - 1| = {np.abs(stds - 1.0).max():g}"
            )


@dataclass
class CorrelationMatrix:
    """n x n sample correlation matrix with asset labels."""

    values: np.ndarray
    assets: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise InputError(f"correlation matrix must be square, got {v.shape}")
        if self.assets and len(self.assets) != v.shape[0]:
            raise InputError("asset labels do not match matrix size")
        if np.abs(v - v.T).max() > 1e-12:
            raise InputError("correlation matrix is not symmetric")
        if np.abs(np.diag(v) - 1.0).max() > 1e-12:
            raise InputError("correlation matrix diagonal is not 1")
        if np.abs(v).max() > 1.0 + 1e-12:
            raise InputError(
                f"correlation entries outside [-1, 1]: max |entry| = {np.abs(v).max():.17g}"
            )

    @property
    def n_assets(self) -> int:
        return self.values.shape[0]


def _open_text(source: str | Path | TextIO) -> tuple[TextIO, bool]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    return source, False


def _is_missing(cell: str) -> bool:
    return cell.strip().lower() in MISSING_TOKENS


def load_panel(
    source: str | Path | TextIO, delimiter: str | None = None
) -> ReturnsPanel:
    """Read a delimited return table into a validated panel.

    The first row is a header: first column the date label, each remaining
    column one asset. Rows containing a missing value are dropped and
    counted in ``dropped_rows``. Comma and tab delimiters are supported;
    when ``delimiter`` is None it is sniffed from the header line.

    Raises:
        InputError: duplicate asset names, fewer than 2 complete rows,
            a non-numeric cell (reported with its row and column), or a
            ragged row.
    """
    stream, owned = _open_text(source)
    try:
        first = stream.readline()
        if not first:
            raise InputError("empty input: no header row")
        if delimiter is None:
            delimiter = "\t" if "\t" in first else ","
        header = next(csv.reader([first], delimiter=delimiter))
        if len(header) < 2:
            raise InputError("header must contain a date column and at least one asset")
        assets = tuple(name.strip() for name in header[1:])
        if any(not a for a in assets):
            raise InputError("blank asset name in header")

        dates: list[str] = []
        rows: list[list[float]] = []
        dropped = 0
        reader = csv.reader(stream, delimiter=delimiter)
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise InputError(
                    f"row {line_no} has {len(row)} cells, expected {len(header)}"
                )
            if any(_is_missing(cell) for cell in row[1:]):
                dropped += 1
                continue
            parsed = []
            for asset, cell in zip(assets, row[1:]):
                try:
                    value = float(cell)
                except ValueError:
                    raise InputError(
                        f"non-numeric value {cell.strip()!r} at row {line_no}, "
                        f"column {asset!r}"
                    ) from None
                if not math.isfinite(value):
                    raise InputError(
                        f"non-finite value {cell.strip()!r} at row {line_no}, "
                        f"column {asset!r}"
                    )
                parsed.append(value)
            dates.append(row[0].strip())
            rows.append(parsed)
    finally:
        if owned:
            stream.close()

    if len(rows) < 2:
        raise InputError(
            f"fewer than 2 complete rows after dropping {dropped} incomplete row(s)"
        )
    return ReturnsPanel(
        dates=tuple(dates),
        assets=assets,
        values=np.array(rows, dtype=float),
        dropped_rows=dropped,
    )


def loads_panel(text: str, delimiter: str | None = None) -> ReturnsPanel:
    """``load_panel`` over an in-memory string."""
    return load_panel(io.StringIO(text), delimiter=delimiter)


def write_panel(panel: ReturnsPanel, dest: str | Path | TextIO, delimiter: str = ",") -> None:
    """Write a panel in the same delimited format ``load_panel`` reads.

    Values are written with full round-trip precision, so a write/load
    cycle reproduces the panel bit for bit.
    """
    stream, owned = (
        (open(dest, "w", encoding="utf-8", newline=""), True)
        if isinstance(dest, (str, Path))
        else (dest, False)
    )
    try:
        writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
        writer.writerow(("date",) + panel.assets)
        for date, row in zip(panel.dates, panel.values):
            writer.writerow([date] + [repr(float(x)) for x in row])
    finally:
        if owned:
            stream.close()


def standardize(panel: ReturnsPanel) -> StandardizedPanel:
    """Scale each column to sample mean 0 and sample stdev 1 (divisor T-1).

    Raises:
        InputError: a column with zero sample standard deviation, reported
            by asset name.
    """
    values = panel.values
    means = values.mean(axis=0)
    stds = values.std(axis=0, ddof=1)
    scale = np.maximum(1.0, np.abs(values).max(axis=0))
    degenerate = np.flatnonzero(stds <= 1e-12 * scale)
    if degenerate.size:
        names = ", ".join(panel.assets[i] for i in degenerate)
        raise InputError(f"constant column(s) cannot be standardized: {names}")
    return StandardizedPanel(
        dates=panel.dates,
        assets=panel.assets,
        values=(values - means) / stds,
        dropped_rows=panel.dropped_rows,
    )


def correlation(panel: StandardizedPanel) -> CorrelationMatrix:
    """Sample correlation matrix ``X^T X / (T - 1)`` of a standardized panel.

    The diagonal is set to exactly 1 and the result is symmetrized, so the
    output is a valid correlation matrix by construction.
    """
    if not isinstance(panel, StandardizedPanel):
        raise InputError("correlation expects a standardized panel")
    x = panel.values
    c = x.T @ x / (panel.n_periods - 1)
    c = 0.5 * (c + c.T)
    np.fill_diagonal(c, 1.0)
    return CorrelationMatrix(values=c, assets=panel.assets)
