"""Residual defactoring and random-matrix diagnostics.

A pure-noise correlation matrix has eigenvalues asymptotically confined to
the interval ``[(1 - sqrt(n/T))^2, (1 + sqrt(n/T))^2]``. Comparing the
spectrum of defactored residuals against that reference interval and
density shows how much structure a factor set left behind.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import sym_eig_sorted
from .errors import InputError, NumericalError
from .panel import StandardizedPanel

DEFAULT_GRID_SIZE = 51


def mp_threshold(n: int, t: int) -> float:
    """Upper edge ``(1 + sqrt(n/T))^2`` of the pure-noise spectrum."""
    if n < 1 or t < 1:
        raise InputError(f"need n >= 1 and T >= 1, got n={n}, T={t}")
    return float((1.0 + np.sqrt(n / t)) ** 2)


@dataclass(frozen=True)
class MpReference:
    """Noise-spectrum reference: support edges plus sampled density.

    The density is sampled on ``grid`` (``grid_size`` evenly spaced points
    spanning the support); histogram bins in residual reports share this
    grid so empirical and reference curves line up exactly.
    """

    n: int
    t: int
    gamma: float
    lambda_minus: float
    lambda_plus: float
    grid: np.ndarray
    density: np.ndarray

    @property
    def bin_width(self) -> float:
        return float(self.grid[1] - self.grid[0])


def mp_density(n: int, t: int, grid_size: int = DEFAULT_GRID_SIZE) -> MpReference:
    """Sample the pure-noise eigenvalue density on an even grid.

    The density is ``sqrt((l+ - x)(x - l-)) / (2 pi gamma x)`` on the
    support ``[l-, l+]`` and vanishes at both edges. Aspect ratios
    ``gamma = n/T > 1`` (rank-deficient correlation matrices) are rejected.
    """
    if n < 1 or t < 1:
        raise InputError(f"need n >= 1 and T >= 1, got n={n}, T={t}")
    if grid_size < 2:
        raise InputError(f"grid size must be at least 2, got {grid_size}")
    gamma = n / t
    if gamma > 1.0:
        raise InputError(
            f"aspect ratio n/T = {gamma:g} > 1 is out of scope (rank-deficient)"
        )
    sqrt_g = np.sqrt(gamma)
    lo = float((1.0 - sqrt_g) ** 2)
    hi = float((1.0 + sqrt_g) ** 2)
    grid = np.linspace(lo, hi, grid_size)
    inner = np.clip((hi - grid) * (grid - lo), 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        density = np.sqrt(inner) / (2.0 * np.pi * gamma * grid)
    density = np.where(grid > 0.0, density, 0.0)
    density[0] = 0.0
    density[-1] = 0.0
    return MpReference(
        n=n, t=t, gamma=gamma, lambda_minus=lo, lambda_plus=hi,
        grid=grid, density=density,
    )


@dataclass
class ResidualPanel:
    """Re-standardized least-squares residuals of a panel against factors.

    Columns flagged in ``degenerate`` had (numerically) zero residual
    variance and are left as zeros instead of being rescaled.
    """

    dates: tuple[str, ...]
    assets: tuple[str, ...]
    values: np.ndarray
    model_type: str
    cutoff: int
    degenerate: tuple[str, ...] = ()

    @property
    def n_periods(self) -> int:
        return self.values.shape[0]

    @property
    def n_assets(self) -> int:
        return self.values.shape[1]


def _first_dependent_column(design: np.ndarray) -> int:
    """0-based index of the first factor column dependent on its predecessors.

    ``design`` carries the intercept in column 0, so factor ``j`` sits at
    design column ``j + 1``.
    """
    rank = 1
    for j in range(1, design.shape[1]):
        new_rank = np.linalg.matrix_rank(design[:, : j + 1])
        if new_rank == rank:
            return j - 1
        rank = new_rank
    return design.shape[1] - 2


def defactor(
    panel: StandardizedPanel, factors: np.ndarray, model_type: str = "custom"
) -> ResidualPanel:
    """Regress every asset on the factor set and keep standardized residuals.

    The regression includes an intercept, so residuals have exactly zero
    sample mean and zero sample correlation with every supplied factor.
    Residual columns are rescaled back to unit sample variance; columns the
    factors explain completely are flagged degenerate and left as zeros.
    An empty factor set is the identity: the panel is returned unchanged.

    Raises:
        InputError: factor matrix with linearly dependent columns (the
            first dependent column is named) or mismatched length.
    """
    if not isinstance(panel, StandardizedPanel):
        raise InputError("defactor expects a standardized panel")
    f = np.asarray(factors, dtype=float)
    if f.size == 0:
        f = f.reshape(panel.n_periods, 0)
    if f.ndim != 2 or f.shape[0] != panel.n_periods:
        raise InputError(
            f"factor matrix must be {panel.n_periods} x m, got {f.shape}"
        )
    m = f.shape[1]
    if m == 0:
        return ResidualPanel(
            dates=panel.dates,
            assets=panel.assets,
            values=panel.values.copy(),
            model_type=model_type,
            cutoff=0,
        )

    design = np.column_stack([np.ones(panel.n_periods), f])
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise InputError(
            "factor matrix is rank deficient: factor column "
            f"{_first_dependent_column(design)} is linearly dependent"
        )
    coef, _, _, _ = np.linalg.lstsq(design, panel.values, rcond=None)
    residuals = panel.values - design @ coef

    residuals -= residuals.mean(axis=0)
    stds = residuals.std(axis=0, ddof=1)
    degenerate = np.flatnonzero(stds <= 1e-12)
    kept = np.setdiff1d(np.arange(panel.n_assets), degenerate)
    residuals[:, kept] /= stds[kept]
    residuals[:, degenerate] = 0.0
    return ResidualPanel(
        dates=panel.dates,
        assets=panel.assets,
        values=residuals,
        model_type=model_type,
        cutoff=m,
        degenerate=tuple(panel.assets[i] for i in degenerate),
    )


@dataclass
class ResidualReport:
    """Spectrum of the residual correlation matrix against the noise reference."""

    eigenvalues: np.ndarray
    leading_eigenvalue: float
    count_above_threshold: int
    mean_offdiag_correlation: float
    leading_share: float
    hist_edges: np.ndarray
    hist_counts: np.ndarray
    reference: MpReference
    model_type: str
    cutoff: int

    @property
    def n_assets(self) -> int:
        return self.eigenvalues.shape[0]


def residual_spectrum(residuals: ResidualPanel, ref: MpReference) -> ResidualReport:
    """Diagnose a residual panel's correlation spectrum.

    Histogram bin edges reuse the reference grid inside the noise support
    and extend it outward with the same spacing until every eigenvalue is
    covered. ``leading_share`` is the top eigenvalue divided by n, a proxy
    for the average residual correlation level.
    """
    x = residuals.values
    t, n = x.shape
    if t < 2 or n < 1:
        raise InputError(f"residual panel too small: {x.shape}")
    corr = x.T @ x / (t - 1)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    spectrum = sym_eig_sorted(corr)
    ev = spectrum.eigenvalues

    width = ref.bin_width
    if width <= 0.0:
        raise NumericalError("degenerate reference grid")
    n_left = int(np.ceil(max(0.0, ref.lambda_minus - ev.min()) / width))
    n_right = int(np.ceil(max(0.0, ev.max() - ref.lambda_plus) / width))
    left = ref.lambda_minus - width * np.arange(n_left, 0, -1)
    right = ref.lambda_plus + width * np.arange(1, n_right + 1)
    edges = np.concatenate([left, ref.grid, right])
    counts, _ = np.histogram(ev, bins=edges)

    offdiag = corr[~np.eye(n, dtype=bool)]
    return ResidualReport(
        eigenvalues=ev,
        leading_eigenvalue=float(ev[0]),
        count_above_threshold=int((ev > ref.lambda_plus).sum()),
        mean_offdiag_correlation=float(offdiag.mean()) if n > 1 else 0.0,
        leading_share=float(ev[0] / n),
        hist_edges=edges,
        hist_counts=counts,
        reference=ref,
        model_type=residuals.model_type,
        cutoff=residuals.cutoff,
    )
