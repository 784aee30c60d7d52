"""Hot numeric kernels with paired numba and pure-numpy implementations.

Each kernel exists twice: a loop formulation compiled with ``@njit`` and a
vectorized numpy fallback.  ``covreg._backend`` decides which one the
dispatching names (`l1_toeplitz_gap`, `correlation_var_sums`, `wilks_sweep`)
point at; both variants stay importable so tests and benchmarks can compare
them directly.  Agreement is to rounding, not bit-for-bit: accumulation order
differs between the paths.
"""

from __future__ import annotations

import numpy as np

from covreg import _backend

METHOD_PROPOSED = 0
METHOD_BASELINE = 1

TARGET_IDENTITY = 0
TARGET_AR1 = 1
TARGET_EXCHANGEABLE = 2

# Estimated parameter clamp margin; must match targets.VALIDITY_MARGIN.
_MARGIN = 1e-6


# ---------------------------------------------------------------------------
# l1 gap between a correlation matrix and a banded (Toeplitz) target profile


def l1_toeplitz_gap_numpy(r: np.ndarray, profile: np.ndarray) -> float:
    """Sum of |r_ij - profile[|i-j|]| over all entries."""
    p = r.shape[0]
    idx = np.arange(p)
    target = profile[np.abs(idx[:, None] - idx[None, :])]
    return float(np.abs(r - target).sum())


def _l1_toeplitz_gap_loops(r: np.ndarray, profile: np.ndarray) -> float:
    p = r.shape[0]
    acc = 0.0
    for i in range(p):
        for j in range(p):
            d = j - i if j >= i else i - j
            acc += abs(r[i, j] - profile[d])
    return acc


# ---------------------------------------------------------------------------
# Schafer-Strimmer moments: intensity numerator/denominator sums


def correlation_var_sums_numpy(xstd: np.ndarray) -> tuple[float, float]:
    """Off-diagonal sums of Var-hat(r_ij) and r_ij^2 from standardized data.

    ``xstd`` holds residuals standardized by the unbiased (n-1) standard
    deviation; w_kij = xstd_ki * xstd_kj, Var-hat(r_ij) = n/(n-1)^3 *
    sum_k (w_kij - wbar_ij)^2 and r_ij = sum_k w_kij / (n-1).
    """
    n = xstd.shape[0]
    w1 = xstd.T @ xstd
    w2 = (xstd**2).T @ (xstd**2)
    var_r = n / (n - 1.0) ** 3 * (w2 - w1**2 / n)
    r = w1 / (n - 1.0)
    off = ~np.eye(xstd.shape[1], dtype=bool)
    return float(var_r[off].sum()), float((r[off] ** 2).sum())


def _correlation_var_sums_loops(xstd: np.ndarray) -> tuple[float, float]:
    n, p = xstd.shape
    w1 = np.dot(xstd.T, xstd)
    x2 = xstd * xstd
    w2 = np.dot(x2.T, x2)
    c = n / (n - 1.0) ** 3
    sum_var = 0.0
    sum_r2 = 0.0
    for i in range(p):
        for j in range(p):
            if i != j:
                sum_var += c * (w2[i, j] - w1[i, j] * w1[i, j] / n)
                rr = w1[i, j] / (n - 1.0)
                sum_r2 += rr * rr
    return sum_var, sum_r2


# ---------------------------------------------------------------------------
# Wilks' lambda sweep: the permutation-test inner loop
#
# For every row of label codes the statistic is recomputed from scratch:
# group-center, estimate the within covariance (proposed regularizer or the
# shrinkage baseline), and form lambda = |W_reg| / |W_reg + B| with W_reg the
# regularized within-group scatter (n times the estimated covariance) and
# B = T_total - W the between-group scatter.


def _wilks_sweep_loops(
    x: np.ndarray,
    codes_all: np.ndarray,
    n_groups: int,
    method_id: int,
    target_id: int,
    gamma_override: float,
) -> np.ndarray:
    n, p = x.shape
    m = codes_all.shape[0]
    out = np.empty(m)

    mu = np.zeros(p)
    for i in range(n):
        for j in range(p):
            mu[j] += x[i, j]
    for j in range(p):
        mu[j] /= n
    xt = x - mu
    t_tot = np.dot(xt.T, xt)

    counts = np.zeros(n_groups)
    means = np.zeros((n_groups, p))
    xc = np.empty((n, p))
    w_reg = np.empty((p, p))
    powers = np.empty(p)

    for s_i in range(m):
        codes = codes_all[s_i]
        counts[:] = 0.0
        means[:] = 0.0
        for i in range(n):
            g = codes[i]
            counts[g] += 1.0
            for j in range(p):
                means[g, j] += x[i, j]
        for g in range(n_groups):
            for j in range(p):
                means[g, j] /= counts[g]
        for i in range(n):
            g = codes[i]
            for j in range(p):
                xc[i, j] = x[i, j] - means[g, j]

        w = np.dot(xc.T, xc)
        for a in range(p):
            for b in range(a):
                v = 0.5 * (w[a, b] + w[b, a])
                w[a, b] = v
                w[b, a] = v

        d = np.empty(p)
        degenerate = False
        for j in range(p):
            d[j] = w[j, j] / n
            if d[j] <= 0.0:
                degenerate = True
        if degenerate:
            # a with-replacement resample can collapse a column; no within-group
            # variance means no evidence either way
            out[s_i] = 1.0
            continue
        sd = np.sqrt(d)
        bmat = t_tot - w

        if method_id == METHOD_PROPOSED:
            t_hat = 0.0
            t_l1 = float(p)
            if target_id == TARGET_AR1:
                acc = 0.0
                for a in range(p - 1):
                    acc += w[a, a + 1] / (n * sd[a] * sd[a + 1])
                t_hat = acc / (p - 1)
                lo = -1.0 + _MARGIN
                hi = 1.0 - _MARGIN
                t_hat = min(max(t_hat, lo), hi)
                at = abs(t_hat)
                acc = 0.0
                for k in range(1, p):
                    acc += k * at ** (p - k)
                t_l1 = p + 2.0 * acc
            elif target_id == TARGET_EXCHANGEABLE:
                acc = 0.0
                for a in range(p):
                    for b in range(p):
                        if a != b:
                            acc += w[a, b] / (n * sd[a] * sd[b])
                t_hat = acc / (p * (p - 1.0))
                lo = -1.0 / (p - 1.0) + _MARGIN
                hi = 1.0 - _MARGIN
                t_hat = min(max(t_hat, lo), hi)
                t_l1 = p + p * (p - 1.0) * abs(t_hat)

            for k in range(p):
                powers[k] = t_hat**k
            num = 0.0
            for a in range(p):
                for b in range(p):
                    if a != b:
                        r_ab = w[a, b] / (n * sd[a] * sd[b])
                        if target_id == TARGET_IDENTITY:
                            num += abs(r_ab)
                        elif target_id == TARGET_AR1:
                            dist = b - a if b >= a else a - b
                            num += abs(r_ab - powers[dist])
                        else:
                            num += abs(r_ab - t_hat)
            kappa = num / t_l1
            if gamma_override == gamma_override:  # not NaN
                gamma = gamma_override
            else:
                gamma = 1.0 / (1.0 + kappa)
            omg = 1.0 - gamma
            for a in range(p):
                w_reg[a, a] = n * d[a]
                for b in range(a):
                    if target_id == TARGET_IDENTITY:
                        t_ab = 0.0
                    elif target_id == TARGET_AR1:
                        t_ab = powers[a - b]
                    else:
                        t_ab = t_hat
                    v = gamma * w[a, b] + omg * n * sd[a] * sd[b] * t_ab
                    w_reg[a, b] = v
                    w_reg[b, a] = v
        else:
            # analytic-intensity shrinkage toward the identity correlation
            colm = np.zeros(p)
            for i in range(n):
                for j in range(p):
                    colm[j] += xc[i, j]
            for j in range(p):
                colm[j] /= n
            a_std = np.empty((n, p))
            degenerate = False
            for j in range(p):
                acc = 0.0
                for i in range(n):
                    v = xc[i, j] - colm[j]
                    a_std[i, j] = v
                    acc += v * v
                var_u = acc / (n - 1.0)
                if var_u <= 0.0:
                    degenerate = True
                    break
                sdev = np.sqrt(var_u)
                for i in range(n):
                    a_std[i, j] /= sdev
            if degenerate:
                out[s_i] = 1.0
                continue
            w1 = np.dot(a_std.T, a_std)
            x2 = a_std * a_std
            w2 = np.dot(x2.T, x2)
            c_var = n / (n - 1.0) ** 3
            sum_var = 0.0
            sum_r2 = 0.0
            for a in range(p):
                for b in range(p):
                    if a != b:
                        sum_var += c_var * (w2[a, b] - w1[a, b] * w1[a, b] / n)
                        rr = w1[a, b] / (n - 1.0)
                        sum_r2 += rr * rr
            if sum_r2 == 0.0:
                lam = 1.0
            else:
                lam = min(max(sum_var / sum_r2, 0.0), 1.0)
            oml = 1.0 - lam
            for a in range(p):
                w_reg[a, a] = n * d[a]
                for b in range(a):
                    v = oml * w[a, b]
                    w_reg[a, b] = v
                    w_reg[b, a] = v

        ld1 = np.linalg.slogdet(w_reg)[1]
        ld2 = np.linalg.slogdet(w_reg + bmat)[1]
        out[s_i] = np.exp(ld1 - ld2)
    return out


def wilks_sweep_numpy(
    x: np.ndarray,
    codes_all: np.ndarray,
    n_groups: int,
    method_id: int,
    target_id: int,
    gamma_override: float,
) -> np.ndarray:
    """Pure-numpy twin of the njit sweep; same statistic, vectorized per row."""
    n, p = x.shape
    m = codes_all.shape[0]
    out = np.empty(m)
    xt = x - x.mean(axis=0, keepdims=True)
    t_tot = xt.T @ xt

    for s_i in range(m):
        codes = codes_all[s_i]
        counts = np.bincount(codes, minlength=n_groups).astype(np.float64)
        sums = np.zeros((n_groups, p))
        np.add.at(sums, codes, x)
        means = sums / counts[:, None]
        xc = x - means[codes]

        w = xc.T @ xc
        w = 0.5 * (w + w.T)
        d = np.diag(w) / n
        if np.any(d <= 0.0):
            out[s_i] = 1.0
            continue
        sd = np.sqrt(d)
        bmat = t_tot - w

        if method_id == METHOD_PROPOSED:
            r = w / (n * np.outer(sd, sd))
            np.fill_diagonal(r, 1.0)
            if target_id == TARGET_IDENTITY:
                t_hat = 0.0
                t_l1 = float(p)
            elif target_id == TARGET_AR1:
                t_hat = float(np.diagonal(r, offset=1).mean())
                t_hat = min(max(t_hat, -1.0 + _MARGIN), 1.0 - _MARGIN)
                k = np.arange(1, p, dtype=np.float64)
                t_l1 = float(p + 2.0 * np.sum(k * abs(t_hat) ** (p - k)))
            else:
                t_hat = float((r.sum() - p) / (p * (p - 1.0)))
                t_hat = min(max(t_hat, -1.0 / (p - 1.0) + _MARGIN), 1.0 - _MARGIN)
                t_l1 = float(p + p * (p - 1.0) * abs(t_hat))
            if target_id == TARGET_AR1:
                profile = t_hat ** np.arange(p, dtype=np.float64)
            elif target_id == TARGET_EXCHANGEABLE:
                profile = np.full(p, t_hat)
                profile[0] = 1.0
            else:
                profile = np.zeros(p)
                profile[0] = 1.0
            idx = np.arange(p)
            target = profile[np.abs(idx[:, None] - idx[None, :])]
            num = float(np.abs(r - target).sum())
            kappa = num / t_l1
            gamma = gamma_override if gamma_override == gamma_override else 1.0 / (1.0 + kappa)
            w_reg = gamma * w + (1.0 - gamma) * n * np.outer(sd, sd) * target
            np.fill_diagonal(w_reg, n * d)
        else:
            xcc = xc - xc.mean(axis=0, keepdims=True)
            var_u = (xcc**2).sum(axis=0) / (n - 1.0)
            if np.any(var_u <= 0.0):
                out[s_i] = 1.0
                continue
            a_std = xcc / np.sqrt(var_u)
            sum_var, sum_r2 = correlation_var_sums_numpy(a_std)
            lam = 1.0 if sum_r2 == 0.0 else min(max(sum_var / sum_r2, 0.0), 1.0)
            w_reg = (1.0 - lam) * w
            np.fill_diagonal(w_reg, n * d)

        ld1 = np.linalg.slogdet(w_reg)[1]
        ld2 = np.linalg.slogdet(w_reg + bmat)[1]
        out[s_i] = np.exp(ld1 - ld2)
    return out


# ---------------------------------------------------------------------------
# dispatch

if _backend.HAVE_NUMBA:
    from numba import njit

    l1_toeplitz_gap_numba = njit(cache=True, nogil=True)(_l1_toeplitz_gap_loops)
    correlation_var_sums_numba = njit(cache=True, nogil=True)(_correlation_var_sums_loops)
    wilks_sweep_numba = njit(cache=True, nogil=True)(_wilks_sweep_loops)
else:  # pragma: no cover - exercised only when numba is absent
    l1_toeplitz_gap_numba = None
    correlation_var_sums_numba = None
    wilks_sweep_numba = None

if _backend.use_numba():
    ACTIVE_BACKEND = "numba"
    l1_toeplitz_gap = l1_toeplitz_gap_numba
    correlation_var_sums = correlation_var_sums_numba
    _wilks_sweep_active = wilks_sweep_numba
else:
    ACTIVE_BACKEND = "numpy"
    l1_toeplitz_gap = l1_toeplitz_gap_numpy
    correlation_var_sums = correlation_var_sums_numpy
    _wilks_sweep_active = wilks_sweep_numpy


def wilks_sweep(
    x: np.ndarray,
    codes_all: np.ndarray,
    n_groups: int,
    method_id: int,
    target_id: int,
    gamma_override: float = np.nan,
) -> np.ndarray:
    """Wilks' lambda for every row of label codes (row 0 = observed labels)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    codes_all = np.ascontiguousarray(codes_all, dtype=np.int64)
    return _wilks_sweep_active(
        x, codes_all, int(n_groups), int(method_id), int(target_id), float(gamma_override)
    )
