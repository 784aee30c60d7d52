"""Dense symmetric-matrix primitives: centering, covariance, correlation, spectra."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from covreg.errors import (
    AsymmetryError,
    DegenerateSampleError,
    InvalidDataError,
    ZeroVarianceError,
)

# Input asymmetry allowed before construction fails; anything below it is
# symmetrized away so accumulation-order drift never propagates.
ASYMMETRY_TOL = 1e-8
CORRELATION_DIAG_TOL = 1e-12


@dataclass(frozen=True)
class Dataset:
    """An n x p observation matrix; rows are observations, columns variables.

    ``group_labels`` is an optional length-n array of category ids used by the
    MANOVA routines; everything else ignores it.
    """

    values: np.ndarray
    group_labels: np.ndarray | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise InvalidDataError(f"expected a 2-d observation matrix, got ndim={values.ndim}")
        n, p = values.shape
        if n < 2:
            raise InvalidDataError(f"need at least 2 observations, got n={n}")
        if p < 1:
            raise InvalidDataError("need at least one variable column")
        if not np.all(np.isfinite(values)):
            i, j = np.argwhere(~np.isfinite(values))[0]
            raise InvalidDataError(f"non-finite entry at row {i}, column {j}")
        object.__setattr__(self, "values", values)
        if self.group_labels is not None:
            labels = np.asarray(self.group_labels)
            if labels.shape != (n,):
                raise InvalidDataError(
                    f"group_labels must be a length-{n} vector, got shape {labels.shape}"
                )
            object.__setattr__(self, "group_labels", labels)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SymMatrix:
    """A dense symmetric matrix tagged with its scale (covariance or correlation).

    Construction symmetrizes ``(m + m.T) / 2`` after checking that the input is
    not asymmetric beyond tolerance, and enforces the unit diagonal on
    correlation-scale matrices.
    """

    values: np.ndarray
    scale: str = "covariance"

    def __post_init__(self) -> None:
        m = np.asarray(self.values, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidDataError(f"expected a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidDataError("matrix has non-finite entries")
        if self.scale not in ("covariance", "correlation"):
            raise ValueError(f"scale must be 'covariance' or 'correlation', got {self.scale!r}")
        gap = float(np.max(np.abs(m - m.T))) if m.size else 0.0
        if gap > ASYMMETRY_TOL * max(1.0, float(np.max(np.abs(m)))):
            raise AsymmetryError(f"matrix is asymmetric: max |m - m.T| = {gap:.3e}")
        m = 0.5 * (m + m.T)
        if self.scale == "correlation":
            diag_gap = float(np.max(np.abs(np.diag(m) - 1.0)))
            if diag_gap > CORRELATION_DIAG_TOL:
                raise InvalidDataError(
                    f"correlation-scale matrix must have a unit diagonal (off by {diag_gap:.3e})"
                )
            if float(np.max(np.abs(m))) > 1.0 + CORRELATION_DIAG_TOL:
                raise InvalidDataError("correlation entries must lie in [-1, 1]")
        object.__setattr__(self, "values", m)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def center_columns(d: Dataset) -> Dataset:
    """Subtract each column's mean; group labels pass through unchanged."""
    centered = d.values - d.values.mean(axis=0, keepdims=True)
    return Dataset(centered, d.group_labels)


def sample_covariance(d: Dataset, divisor: str = "n") -> SymMatrix:
    """Cross-product covariance of centered data.

    ``divisor="n"`` gives the maximum-likelihood estimate X'X/n, ``"n-1"`` its
    unbiased version.  The caller is responsible for centering (see
    :func:`center_columns`); nothing is subtracted here.
    """
    if divisor not in ("n", "n-1"):
        raise ValueError(f"divisor must be 'n' or 'n-1', got {divisor!r}")
    n = d.n
    if divisor == "n-1" and n < 2:
        raise DegenerateSampleError("unbiased covariance needs at least 2 observations")
    denom = n if divisor == "n" else n - 1
    s = d.values.T @ d.values / denom
    return SymMatrix(s, scale="covariance")


def to_correlation(s: SymMatrix) -> tuple[SymMatrix, np.ndarray]:
    """Rescale a covariance matrix to correlation scale.

    Returns the correlation matrix and the original diagonal (the variances),
    which is what the back-transform to covariance scale needs.
    """
    d = np.diag(s.values).copy()
    bad = np.flatnonzero(d <= 0.0)
    if bad.size:
        raise ZeroVarianceError(f"column {bad[0]} has zero (or negative) variance")
    inv_sd = 1.0 / np.sqrt(d)
    r = s.values * np.outer(inv_sd, inv_sd)
    np.fill_diagonal(r, 1.0)
    return SymMatrix(r, scale="correlation"), d


def eigenvalues_sym(m: SymMatrix) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, sorted descending."""
    return np.linalg.eigvalsh(m.values)[::-1].copy()


def eigen_pairs(m: SymMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and the matching eigenvectors as columns."""
    w, q = np.linalg.eigh(m.values)
    return w[::-1].copy(), q[:, ::-1].copy()


def condition_number(m: SymMatrix) -> float:
    """Spectral condition number; ``inf`` when the matrix is not positive definite."""
    w = np.linalg.eigvalsh(m.values)
    lo, hi = float(w[0]), float(w[-1])
    if lo <= 0.0 or hi <= 0.0:
        return float("inf")
    return hi / lo
