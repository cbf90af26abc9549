"""Symmetric eigendecomposition with a fixed ordering and sign convention.

Every spectral computation in the package goes through ``sym_eig_sorted`` so
that eigenvalue ordering, tie-breaking, and eigenvector signs are identical
no matter which module asked for the decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

# Max allowed |A - A^T| before the input is considered non-symmetric.
SYMMETRY_TOL = 1e-10
# Below this, a column sum is treated as zero when fixing signs.
ZERO_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """Full eigendecomposition of a symmetric matrix.

    ``eigenvalues`` is sorted non-increasing and column ``k`` of
    ``eigenvectors`` is the unit eigenvector paired with ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]


def _fix_sign(column: np.ndarray) -> np.ndarray:
    """Flip a unit vector so the sum of entries is >= 0.

    When the sum is zero (to ``ZERO_SUM_TOL``) the first entry of
    non-negligible magnitude is made positive instead.
    """
    total = float(column.sum())
    if total > ZERO_SUM_TOL:
        return column
    if total < -ZERO_SUM_TOL:
        return -column
    nonzero = np.flatnonzero(np.abs(column) > ZERO_SUM_TOL)
    if nonzero.size == 0:
        nonzero = np.flatnonzero(column)
    if nonzero.size and column[nonzero[0]] < 0:
        return -column
    return column


def sym_eig_sorted(matrix: np.ndarray) -> Spectrum:
    """Decompose a real symmetric matrix deterministically.

    The input is symmetrized as ``(A + A^T) / 2``, eigenvalues are returned
    in non-increasing order, ties are broken by the index of the
    largest-magnitude eigenvector entry, and each eigenvector is sign-fixed
    so its entry sum is non-negative. Two calls on bitwise-identical inputs
    return bitwise-identical results.

    Args:
        matrix: square 2-d array, symmetric to ``SYMMETRY_TOL``.

    Returns:
        The ordered, sign-fixed :class:`Spectrum`.

    Raises:
        InputError: non-square input, non-finite entries, or asymmetry
            beyond tolerance.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise InputError("matrix contains non-finite entries")
    asym = float(np.abs(a - a.T).max()) if a.size else 0.0
    if asym > SYMMETRY_TOL:
        raise InputError(f"matrix is not symmetric: max |A - A^T| = {asym:g}")
    a = 0.5 * (a + a.T)

    values, vectors = np.linalg.eigh(a)
    values = values[::-1].copy()
    vectors = vectors[:, ::-1].copy()

    # Stable secondary sort so exactly-tied eigenvalues have a fixed order.
    order = sorted(
        range(values.shape[0]),
        key=lambda k: (-values[k], int(np.argmax(np.abs(vectors[:, k])))),
    )
    values = values[order]
    vectors = vectors[:, order]

    for k in range(vectors.shape[1]):
        vectors[:, k] = _fix_sign(vectors[:, k])

    values.setflags(write=False)
    vectors.setflags(write=False)
    return Spectrum(eigenvalues=values, eigenvectors=vectors)
