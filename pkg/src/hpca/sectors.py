"""Sector partitions and one-factor PCA models per sector block.

Each sector gets the full spectrum of its own correlation sub-matrix, the
regression betas of its members on the leading eigenportfolio, and the
leading eigenportfolio return series itself.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence, TextIO

import numpy as np

from .eigen import sym_eig_sorted
from .errors import InputError
from .panel import StandardizedPanel

logger = logging.getLogger(__name__)


@dataclass
class SectorPartition:
    """Assignment of every asset to exactly one sector.

    ``labels`` fixes the sector order; ``assignment[i]`` is the sector index
    of asset ``i``. ``parents`` optionally attaches a coarser grouping label
    to each sector (unused by the two-layer model, kept so deeper
    hierarchies can be layered on later).
    """

    labels: tuple[str, ...]
    assignment: np.ndarray
    parents: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        self.assignment = np.asarray(self.assignment, dtype=int)
        if self.assignment.ndim != 1:
            raise InputError("sector assignment must be 1-d")
        b = len(self.labels)
        if len(set(self.labels)) != b or b == 0:
            raise InputError("sector labels must be unique and non-empty")
        if self.assignment.size and (
            self.assignment.min() < 0 or self.assignment.max() >= b
        ):
            raise InputError("sector assignment index out of range")
        counts = np.bincount(self.assignment, minlength=b)
        empty = [self.labels[k] for k in np.flatnonzero(counts == 0)]
        if empty:
            raise InputError(f"empty sector(s): {', '.join(empty)}")
        if self.parents is not None and len(self.parents) != b:
            raise InputError("parents must supply one label per sector")

    @property
    def n_assets(self) -> int:
        return self.assignment.size

    @property
    def n_sectors(self) -> int:
        return len(self.labels)

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.n_sectors)

    def members(self, k: int) -> np.ndarray:
        """Panel column indices of the assets in sector ``k``."""
        return np.flatnonzero(self.assignment == k)

    @classmethod
    def from_mapping(
        cls, assets: Sequence[str], mapping: Mapping[str, str]
    ) -> "SectorPartition":
        """Build a partition for ``assets`` from an asset -> sector map.

        Sector indices follow first appearance in asset order. Map entries
        for unknown assets are ignored with a warning; assets without a map
        entry are an error.
        """
        missing = [a for a in assets if a not in mapping]
        if missing:
            raise InputError(
                f"{len(missing)} asset(s) missing from sector map: "
                + ", ".join(missing[:10])
                + ("..." if len(missing) > 10 else "")
            )
        unknown = sorted(set(mapping) - set(assets))
        if unknown:
            logger.warning(
                "sector map names %d asset(s) not in the panel (ignored): %s",
                len(unknown),
                ", ".join(unknown[:10]) + ("..." if len(unknown) > 10 else ""),
            )
        labels: list[str] = []
        index: dict[str, int] = {}
        assignment = np.empty(len(assets), dtype=int)
        for i, asset in enumerate(assets):
            sector = mapping[asset]
            if sector not in index:
                index[sector] = len(labels)
                labels.append(sector)
            assignment[i] = index[sector]
        return cls(labels=tuple(labels), assignment=assignment)


def load_sector_map(source: str | Path | TextIO) -> dict[str, str]:
    """Read a two-column ``asset,sector`` file (header required)."""
    stream, owned = (
        (open(source, "r", encoding="utf-8", newline=""), True)
        if isinstance(source, (str, Path))
        else (source, False)
    )
    try:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise InputError("sector map needs a header row with asset,sector columns")
        mapping: dict[str, str] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise InputError(f"sector map row {line_no} has no sector column")
            asset, sector = row[0].strip(), row[1].strip()
            if not asset or not sector:
                raise InputError(f"sector map row {line_no} has a blank field")
            if asset in mapping and mapping[asset] != sector:
                raise InputError(f"conflicting sector for asset {asset!r}")
            mapping[asset] = sector
        if not mapping:
            raise InputError("sector map contains no entries")
        return mapping
    finally:
        if owned:
            stream.close()


@dataclass
class SectorModel:
    """One-factor PCA model of a single sector.

    ``factor`` is the leading eigenportfolio return series (unit sample
    variance, divisor T-1) and ``betas`` are the member regressions on it:
    ``beta = sqrt(lambda_1) * v_1`` entrywise.
    """

    index: int
    label: str
    members: np.ndarray
    assets: tuple[str, ...]
    correlation: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    betas: np.ndarray
    factor: np.ndarray

    @property
    def size(self) -> int:
        return self.members.size

    @property
    def leading_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])


def fit_sector(
    panel: StandardizedPanel, partition: SectorPartition, k: int
) -> SectorModel:
    """Fit the one-factor PCA model of sector ``k``.

    The sector correlation matrix is decomposed with ``sym_eig_sorted``; the
    factor series is the members' standardized returns combined with the
    leading eigenvector weights and scaled by ``1/sqrt(lambda_1)`` so its
    sample variance is 1.
    """
    if not isinstance(panel, StandardizedPanel):
        raise InputError("fit_sector expects a standardized panel")
    if partition.n_assets != panel.n_assets:
        raise InputError(
            f"partition covers {partition.n_assets} assets, panel has {panel.n_assets}"
        )
    if not 0 <= k < partition.n_sectors:
        raise InputError(f"sector index {k} out of range")
    members = partition.members(k)
    x = panel.values[:, members]
    c = x.T @ x / (panel.n_periods - 1)
    c = 0.5 * (c + c.T)
    np.fill_diagonal(c, 1.0)
    spectrum = sym_eig_sorted(c)
    lam1 = float(spectrum.eigenvalues[0])
    v1 = spectrum.eigenvectors[:, 0]
    factor = x @ v1 / np.sqrt(lam1)
    return SectorModel(
        index=k,
        label=partition.labels[k],
        members=members,
        assets=tuple(panel.assets[i] for i in members),
        correlation=c,
        eigenvalues=spectrum.eigenvalues,
        eigenvectors=spectrum.eigenvectors,
        betas=np.sqrt(lam1) * v1,
        factor=factor,
    )


def fit_all_sectors(
    panel: StandardizedPanel, partition: SectorPartition
) -> tuple[SectorModel, ...]:
    """Fit every sector of the partition, in sector order."""
    return tuple(fit_sector(panel, partition, k) for k in range(partition.n_sectors))


def embed(vector: np.ndarray, partition: SectorPartition, k: int) -> np.ndarray:
    """Lift a sector-level vector to the full asset space.

    Entries land at the sector's member positions; all other coordinates are
    zero, so norms are preserved.
    """
    vector = np.asarray(vector, dtype=float)
    members = partition.members(k)
    if vector.shape != (members.size,):
        raise InputError(
            f"vector length {vector.shape} does not match sector size {members.size}"
        )
    out = np.zeros(partition.n_assets)
    out[members] = vector
    return out


def factor_panel(models: Sequence[SectorModel]) -> np.ndarray:
    """Stack the sectors' leading factor series into a T x b matrix."""
    if not models:
        raise InputError("no sector models supplied")
    lengths = {m.factor.shape[0] for m in models}
    if len(lengths) != 1:
        raise InputError(f"factor series lengths differ across sectors: {sorted(lengths)}")
    return np.column_stack([m.factor for m in models])
