"""Structured correlation targets: construction, parameter estimation, closed forms.

Three families are supported: identity (parameter-free), first-order
autoregressive with entries t^|i-j|, and exchangeable (compound symmetry) with
constant off-diagonal t.  The closed-form l1 norms, inverses and
log-determinants double as oracles for the numeric linear algebra elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from covreg.errors import InvalidTargetError, NearSingularError
from covreg.matrix_core import SymMatrix

TARGET_KINDS = ("identity", "ar1", "exchangeable")

# Estimated parameters are clamped this far inside the open validity interval;
# the same margin marks a target as numerically near-singular.
VALIDITY_MARGIN = 1e-6


@dataclass(frozen=True)
class TargetSpec:
    """A target family plus its correlation parameter (absent for identity)."""

    kind: str
    t: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in TARGET_KINDS:
            raise InvalidTargetError(f"unknown target kind {self.kind!r}")
        if self.kind == "identity":
            if self.t is not None:
                raise InvalidTargetError("identity target takes no parameter")
        else:
            if self.t is None or not np.isfinite(self.t):
                raise InvalidTargetError(f"{self.kind} target needs a finite parameter t")
            object.__setattr__(self, "t", float(self.t))

    def validate_for(self, p: int) -> None:
        """Raise unless the spec yields a positive-definite p x p matrix."""
        if p < 1:
            raise InvalidTargetError(f"dimension must be positive, got p={p}")
        if self.kind == "identity":
            return
        t = self.t
        if self.kind == "ar1":
            if not -1.0 < t < 1.0:
                raise InvalidTargetError(f"ar1 target needs |t| < 1, got t={t}")
        else:
            lower = -1.0 / (p - 1) if p > 1 else -1.0
            if not lower < t < 1.0:
                raise InvalidTargetError(
                    f"exchangeable target needs {lower} < t < 1 at p={p}, got t={t}"
                )

    def clamp_bounds(self, p: int) -> tuple[float, float]:
        """Interval the estimated parameter is clamped into for dimension p."""
        if self.kind == "identity":
            raise InvalidTargetError("identity target has no parameter to clamp")
        if self.kind == "ar1":
            return -1.0 + VALIDITY_MARGIN, 1.0 - VALIDITY_MARGIN
        lower = -1.0 / (p - 1) if p > 1 else -1.0
        return lower + VALIDITY_MARGIN, 1.0 - VALIDITY_MARGIN


def _boundary_distance(spec: TargetSpec, p: int) -> float:
    if spec.kind == "identity":
        return float("inf")
    t = spec.t
    if spec.kind == "ar1":
        return 1.0 - abs(t)
    if p == 1:
        return 1.0 - abs(t)
    return min(1.0 - t, t + 1.0 / (p - 1))


def _check_away_from_boundary(spec: TargetSpec, p: int) -> None:
    if _boundary_distance(spec, p) < VALIDITY_MARGIN:
        raise NearSingularError(
            f"{spec.kind} target with t={spec.t} is within {VALIDITY_MARGIN} of singularity at p={p}"
        )


def build_target(spec: TargetSpec, p: int) -> SymMatrix:
    """Materialize the target as a correlation-scale matrix."""
    spec.validate_for(p)
    if spec.kind == "identity":
        m = np.eye(p)
    elif spec.kind == "ar1":
        idx = np.arange(p)
        m = spec.t ** np.abs(idx[:, None] - idx[None, :])
    else:
        m = np.full((p, p), spec.t)
        np.fill_diagonal(m, 1.0)
    return SymMatrix(m, scale="correlation")


def target_profile(spec: TargetSpec, p: int) -> np.ndarray:
    """Target entries by band distance: profile[k] is the value at |i-j| = k.

    All three families are symmetric Toeplitz, so this length-p vector fully
    describes the matrix.  Kernels consume it to avoid rebuilding p x p targets.
    """
    spec.validate_for(p)
    if spec.kind == "identity":
        profile = np.zeros(p)
        profile[0] = 1.0
    elif spec.kind == "ar1":
        profile = spec.t ** np.arange(p, dtype=np.float64)
    else:
        profile = np.full(p, spec.t, dtype=np.float64)
        profile[0] = 1.0
    return profile


def estimate_t(r: SymMatrix, kind: str) -> float:
    """Likelihood-derived estimate of the correlation parameter from R-hat.

    AR(1): the mean of the p-1 first-superdiagonal entries.  Exchangeable: the
    mean of all p(p-1) off-diagonal entries.  The result is clamped strictly
    inside the positive-definiteness interval (margin ``VALIDITY_MARGIN``) so
    downstream closed forms stay valid on noisy data.
    """
    if r.scale != "correlation":
        raise ValueError("estimate_t expects a correlation-scale matrix")
    if kind == "identity":
        raise InvalidTargetError("identity target has no correlation parameter")
    if kind not in TARGET_KINDS:
        raise InvalidTargetError(f"unknown target kind {kind!r}")
    p = r.dim
    if p < 2:
        raise InvalidTargetError("correlation parameter is undefined for p = 1")
    if kind == "ar1":
        vals = np.diagonal(r.values, offset=1)
    else:
        vals = r.values[~np.eye(p, dtype=bool)]
    # The mean of identical entries is that entry; bypassing summation keeps the
    # estimator bit-exact on exactly-structured input.
    if np.all(vals == vals[0]):
        t = float(vals[0])
    else:
        t = float(vals.mean())
    lo, hi = TargetSpec(kind, 0.0).clamp_bounds(p)
    return min(max(t, lo), hi)


def target_l1_norm(spec: TargetSpec, p: int) -> float:
    """Closed-form sum of absolute entries of the target.

    The parameter enters through |t| so the value is the true elementwise l1
    norm for negative t as well.
    """
    spec.validate_for(p)
    if spec.kind == "identity":
        return float(p)
    a = abs(spec.t)
    if spec.kind == "ar1":
        k = np.arange(1, p, dtype=np.float64)
        return float(p + 2.0 * np.sum(k * a ** (p - k)))
    return float(p + p * (p - 1) * a)


def target_inverse(spec: TargetSpec, p: int) -> SymMatrix:
    """Closed-form inverse of the target.

    AR(1) inverses are tridiagonal with corner diagonal 1/(1-t^2), interior
    diagonal (1+t^2)/(1-t^2) and off-diagonal -t/(1-t^2); exchangeable inverses
    are (1/(1-t)) [I - t/(1+(p-1)t) J].
    """
    spec.validate_for(p)
    _check_away_from_boundary(spec, p)
    if spec.kind == "identity" or p == 1:
        return SymMatrix(np.eye(p), scale="covariance")
    t = spec.t
    if spec.kind == "ar1":
        c = 1.0 / (1.0 - t * t)
        m = np.zeros((p, p))
        np.fill_diagonal(m, (1.0 + t * t) * c)
        m[0, 0] = c
        m[p - 1, p - 1] = c
        off = -t * c
        idx = np.arange(p - 1)
        m[idx, idx + 1] = off
        m[idx + 1, idx] = off
        return SymMatrix(m, scale="covariance")
    denom = 1.0 + (p - 1) * t
    m = np.full((p, p), -t / ((1.0 - t) * denom))
    np.fill_diagonal(m, (1.0 + (p - 2) * t) / ((1.0 - t) * denom))
    return SymMatrix(m, scale="covariance")


def target_logdet(spec: TargetSpec, p: int) -> float:
    """Closed-form log-determinant: (p-1) log(1-t^2) for AR(1),
    (p-1) log(1-t) + log(1+(p-1)t) for exchangeable, 0 for identity."""
    spec.validate_for(p)
    _check_away_from_boundary(spec, p)
    if spec.kind == "identity" or p == 1:
        return 0.0
    t = spec.t
    if spec.kind == "ar1":
        return float((p - 1) * np.log1p(-t * t))
    return float((p - 1) * np.log1p(-t) + np.log1p((p - 1) * t))
