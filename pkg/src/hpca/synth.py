"""Synthetic market generator with known hierarchical ground truth.

Panels are drawn from a jointly Gaussian distribution whose population
correlation matrix is assembled exactly like the fitted hierarchical
matrix: empirical-style blocks within sectors, scaled-beta products across
sectors. The generator returns that population matrix alongside the panel
so estimation tests have an exact oracle.
"""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .eigen import Spectrum, sym_eig_sorted
from .errors import InputError
from .model import assemble_hpca_matrix
from .panel import ReturnsPanel
from .sectors import SectorPartition

PSD_TOL = -1e-10

# Sector sizes of a GICS-like 11-sector large-cap universe (n = 462).
DEFAULT_SECTORS = (
    ("Consumer Discretionary", 73),
    ("Consumer Staples", 56),
    ("Energy", 27),
    ("Financials", 59),
    ("Health Care", 51),
    ("Industrials", 57),
    ("Information Technology", 58),
    ("Materials", 23),
    ("Real Estate", 27),
    ("Telecommunication Services", 3),
    ("Utilities", 28),
)
DEFAULT_INTRA = (0.35, 0.30, 0.45, 0.40, 0.30, 0.35, 0.35, 0.40, 0.35, 0.50, 0.45)


def _check_correlation(matrix: np.ndarray, what: str) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"{what} must be square, got shape {m.shape}")
    if np.abs(m - m.T).max() > 1e-10:
        raise InputError(f"{what} is not symmetric")
    if np.abs(np.diag(m) - 1.0).max() > 1e-10:
        raise InputError(f"{what} diagonal is not 1")
    if float(np.linalg.eigvalsh(0.5 * (m + m.T)).min()) < PSD_TOL:
        raise InputError(f"{what} is not positive semi-definite")
    return m


@dataclass(frozen=True)
class SectorSpec:
    """One sector's size and intra-block correlation structure.

    Either ``equicorrelation`` (a single off-diagonal level) or a full
    ``correlation`` matrix must be given; a singleton sector may omit both.
    """

    name: str
    size: int
    equicorrelation: float | None = None
    correlation: np.ndarray | None = None

    def block_correlation(self) -> np.ndarray:
        if self.size < 1:
            raise InputError(f"sector {self.name!r} has size {self.size}")
        if self.correlation is not None:
            m = _check_correlation(
                self.correlation, f"sector {self.name!r} correlation"
            )
            if m.shape != (self.size, self.size):
                raise InputError(
                    f"sector {self.name!r} correlation shape {m.shape} "
                    f"does not match size {self.size}"
                )
            return m
        rho = 0.0 if self.equicorrelation is None else float(self.equicorrelation)
        if self.size > 1 and not -1.0 / (self.size - 1) <= rho <= 1.0:
            raise InputError(
                f"equicorrelation {rho} invalid for sector of size {self.size}"
            )
        block = np.full((self.size, self.size), rho)
        np.fill_diagonal(block, 1.0)
        return block


@dataclass(frozen=True)
class MarketSpec:
    """Full description of a synthetic market.

    ``factor_correlation`` is the population correlation matrix of the
    sectors' leading factors; ``n_periods`` the number of sampled dates.
    """

    sectors: tuple[SectorSpec, ...]
    factor_correlation: np.ndarray
    n_periods: int
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.sectors:
            raise InputError("market spec needs at least one sector")
        names = [s.name for s in self.sectors]
        if len(set(names)) != len(names):
            raise InputError("sector names must be unique")
        fc = _check_correlation(self.factor_correlation, "factor correlation")
        if fc.shape != (len(self.sectors), len(self.sectors)):
            raise InputError(
                f"factor correlation shape {fc.shape} does not match "
                f"{len(self.sectors)} sectors"
            )
        object.__setattr__(self, "factor_correlation", fc)
        if self.n_periods < 2:
            raise InputError("n_periods must be at least 2")
        for s in self.sectors:
            s.block_correlation()

    @property
    def n_assets(self) -> int:
        return sum(s.size for s in self.sectors)

    @property
    def n_sectors(self) -> int:
        return len(self.sectors)


@dataclass
class GroundTruth:
    """Population quantities behind a generated panel."""

    partition: SectorPartition
    population_matrix: np.ndarray
    factor_correlation: np.ndarray
    betas: np.ndarray
    sector_spectra: tuple[Spectrum, ...]


def _partition_for(spec: MarketSpec) -> SectorPartition:
    assignment = np.concatenate(
        [np.full(s.size, k, dtype=int) for k, s in enumerate(spec.sectors)]
    )
    return SectorPartition(
        labels=tuple(s.name for s in spec.sectors), assignment=assignment
    )


def _asset_names(spec: MarketSpec) -> tuple[str, ...]:
    names = []
    for k, s in enumerate(spec.sectors):
        names.extend(f"S{k + 1:02d}A{j + 1:03d}" for j in range(s.size))
    return tuple(names)


def _date_labels(count: int) -> tuple[str, ...]:
    start = datetime.date(2000, 1, 3)
    return tuple((start + datetime.timedelta(days=i)).isoformat() for i in range(count))


def ground_truth(spec: MarketSpec) -> GroundTruth:
    """Population partition, blocks, betas, and hierarchical matrix of a spec."""
    partition = _partition_for(spec)
    blocks = [s.block_correlation() for s in spec.sectors]
    spectra = tuple(sym_eig_sorted(block) for block in blocks)
    betas_per_sector = [
        np.sqrt(sp.eigenvalues[0]) * sp.eigenvectors[:, 0] for sp in spectra
    ]
    matrix = assemble_hpca_matrix(
        partition, blocks, betas_per_sector, spec.factor_correlation
    )
    return GroundTruth(
        partition=partition,
        population_matrix=matrix,
        factor_correlation=spec.factor_correlation,
        betas=np.concatenate(betas_per_sector),
        sector_spectra=spectra,
    )


def generate(spec: MarketSpec, seed: int | None = None) -> tuple[ReturnsPanel, GroundTruth]:
    """Draw a Gaussian panel whose population correlation is the spec's matrix.

    Deterministic for a given (spec, seed); ``seed`` defaults to the spec's
    own seed field.
    """
    truth = ground_truth(spec)
    spectrum = sym_eig_sorted(truth.population_matrix)
    if float(spectrum.eigenvalues.min()) < PSD_TOL:
        raise InputError(
            "population matrix is not positive semi-definite "
            f"(min eigenvalue {spectrum.eigenvalues.min():g})"
        )
    root = spectrum.eigenvectors * np.sqrt(np.clip(spectrum.eigenvalues, 0.0, None))
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    shocks = rng.standard_normal((spec.n_periods, spec.n_assets))
    panel = ReturnsPanel(
        dates=_date_labels(spec.n_periods),
        assets=_asset_names(spec),
        values=shocks @ root.T,
    )
    return panel, truth


def sector_map_for(spec: MarketSpec) -> dict[str, str]:
    """Asset -> sector mapping matching the generated panel's asset names."""
    mapping = {}
    for k, s in enumerate(spec.sectors):
        for j in range(s.size):
            mapping[f"S{k + 1:02d}A{j + 1:03d}"] = s.name
    return mapping


def default_market_spec(n_periods: int = 1508, seed: int = 0) -> MarketSpec:
    """An 11-sector, 462-asset market with positively correlated sectors.

    Sector factor correlations follow a one-factor pattern ``c_k * c_l``
    with loadings rising from 0.55 to 0.85, so every pair is distinct and
    the matrix is positive definite by construction.
    """
    b = len(DEFAULT_SECTORS)
    loadings = 0.55 + 0.3 * np.arange(b) / (b - 1)
    factor_corr = np.outer(loadings, loadings)
    np.fill_diagonal(factor_corr, 1.0)
    sectors = tuple(
        SectorSpec(name=name, size=size, equicorrelation=rho)
        for (name, size), rho in zip(DEFAULT_SECTORS, DEFAULT_INTRA)
    )
    return MarketSpec(
        sectors=sectors,
        factor_correlation=factor_corr,
        n_periods=n_periods,
        seed=seed,
    )


def market_spec_to_dict(spec: MarketSpec) -> dict:
    doc: dict = {
        "n_periods": spec.n_periods,
        "seed": spec.seed,
        "factor_correlation": spec.factor_correlation.tolist(),
        "sectors": [],
    }
    for s in spec.sectors:
        entry: dict = {"name": s.name, "size": s.size}
        if s.correlation is not None:
            entry["correlation"] = np.asarray(s.correlation).tolist()
        elif s.equicorrelation is not None:
            entry["equicorrelation"] = s.equicorrelation
        doc["sectors"].append(entry)
    return doc


def market_spec_from_dict(doc: dict) -> MarketSpec:
    try:
        sectors = tuple(
            SectorSpec(
                name=entry["name"],
                size=int(entry["size"]),
                equicorrelation=entry.get("equicorrelation"),
                correlation=(
                    np.asarray(entry["correlation"], dtype=float)
                    if "correlation" in entry
                    else None
                ),
            )
            for entry in doc["sectors"]
        )
        return MarketSpec(
            sectors=sectors,
            factor_correlation=np.asarray(doc["factor_correlation"], dtype=float),
            n_periods=int(doc["n_periods"]),
            seed=int(doc.get("seed", 0)),
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed market spec: {exc}") from exc


def load_market_spec(path: str | Path) -> MarketSpec:
    """Read a market spec from a JSON document."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"market spec is not valid JSON: {exc}") from exc
    return market_spec_from_dict(doc)


def save_market_spec(spec: MarketSpec, path: str | Path) -> None:
    """Write a market spec as JSON (inverse of :func:`load_market_spec`)."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(market_spec_to_dict(spec), fh, indent=1)
        fh.write("\n")
