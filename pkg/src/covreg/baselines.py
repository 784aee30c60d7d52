"""Competitor estimators: the analytic-intensity shrinkage toward the identity.

This is the standard variance-of-correlations intensity,
``lambda* = sum_{i!=j} Var-hat(r_ij) / sum_{i!=j} r_ij^2``, clamped to [0, 1],
applied as ``R* = (1-lambda) R-hat + lambda I``.  The plain sample covariance
(the other comparator) already lives in :mod:`covreg.matrix_core`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from covreg import _kernels
from covreg.errors import DegenerateSampleError
from covreg.matrix_core import Dataset, SymMatrix, center_columns, sample_covariance, to_correlation


@dataclass(frozen=True)
class ShrinkageEstimate:
    """Shrinkage intensity and the shrunk correlation matrix."""

    intensity: float
    r_star: SymMatrix
    r_hat: SymMatrix
    sample_diag: np.ndarray


def shrink_identity(d: Dataset) -> ShrinkageEstimate:
    """Shrink the sample correlation toward the identity with analytic intensity.

    Needs n >= 3: the variance of a correlation coefficient is estimated from
    the per-observation products of standardized residuals.  When every
    off-diagonal sample correlation is exactly zero the intensity is 1 by
    convention (the target is already attained).
    """
    n = d.n
    if n < 3:
        raise DegenerateSampleError("analytic shrinkage intensity needs at least 3 observations")
    centered = center_columns(d)
    s = sample_covariance(centered, "n")
    r_hat, diag = to_correlation(s)
    var_u = (centered.values**2).sum(axis=0) / (n - 1.0)
    xstd = centered.values / np.sqrt(var_u)
    sum_var, sum_r2 = _kernels.correlation_var_sums(np.ascontiguousarray(xstd))
    if sum_r2 == 0.0:
        lam = 1.0
    else:
        lam = min(max(sum_var / sum_r2, 0.0), 1.0)
    r_star = (1.0 - lam) * r_hat.values + lam * np.eye(d.p)
    np.fill_diagonal(r_star, 1.0)
    return ShrinkageEstimate(
        intensity=lam,
        r_star=SymMatrix(r_star, scale="correlation"),
        r_hat=r_hat,
        sample_diag=diag,
    )
