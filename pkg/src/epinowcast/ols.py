"""Ordinary least squares with full classical inference for small dense problems.

The production solve path is Householder QR (better conditioned than normal
equations); tests cross-check it against an independent normal-equations
oracle. Inference assumes homoskedastic errors: SEs from s^2 (X'X)^-1,
two-tailed p-values from Student's t with df = n - k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RankDeficient, TooFewObservations

RANK_TOL = 1e-10  # relative threshold on the QR R-diagonal


@dataclass(frozen=True)
class DesignMatrix:
    """n x k regressor matrix with named columns and a response vector."""

    column_names: tuple[str, ...]
    x: np.ndarray
    y: np.ndarray
    has_intercept: bool = True

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.shape[0]:
            raise ValueError(f"shape mismatch: x {x.shape}, y {y.shape}")
        n, k = x.shape
        if len(self.column_names) != k:
            raise ValueError(f"{len(self.column_names)} names for {k} columns")
        if len(set(self.column_names)) != k:
            raise ValueError("column names must be unique")
        if n <= k:
            raise TooFewObservations(f"n={n} observations for k={k} regressors")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("design contains non-finite entries")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def k(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class OlsFit:
    """Coefficients plus the classical inference block for one OLS fit."""

    column_names: tuple[str, ...]
    coefficients: dict[str, float]
    standard_errors: dict[str, float]
    t_stats: dict[str, float]
    p_values: dict[str, float]
    r_squared: float
    adj_r_squared: float
    residual_std_error: float
    df_residual: int
    f_statistic: float | None
    f_df: tuple[int, int] | None
    fitted: np.ndarray
    residuals: np.ndarray
    n: int
    k: int


def _householder_qr(a: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduce [a | y] with Householder reflections; returns (R, Q'y)."""
    r = a.copy()
    z = y.copy()
    n, k = r.shape
    for j in range(k):
        col = r[j:, j]
        normx = np.linalg.norm(col)
        if normx == 0.0:
            continue  # zero column: R[j, j] stays 0, caught by the rank check
        alpha = -math.copysign(normx, col[0]) if col[0] != 0 else -normx
        v = col.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        r[j:, j:] -= 2.0 * np.outer(v, v @ r[j:, j:])
        z[j:] -= 2.0 * v * (v @ z[j:])
        r[j, j] = alpha  # exact value; the reflection leaves roundoff here
        r[j + 1 :, j] = 0.0
    return r[:k, :k], z[:k]


def _back_substitute(r: np.ndarray, b: np.ndarray) -> np.ndarray:
    k = r.shape[0]
    out = np.zeros(k)
    for i in range(k - 1, -1, -1):
        out[i] = (b[i] - r[i, i + 1 :] @ out[i + 1 :]) / r[i, i]
    return out


def fit(design: DesignMatrix, rank_tol: float = RANK_TOL) -> OlsFit:
    """Least-squares fit of design.y on design.x via Householder QR.

    Raises RankDeficient when the smallest R-diagonal magnitude falls below
    rank_tol times the largest.
    """
    x, y = design.x, design.y
    n, k = design.n, design.k
    r, qty = _householder_qr(x, y)
    diag = np.abs(np.diag(r))
    if diag.min() < rank_tol * diag.max():
        worst = design.column_names[int(diag.argmin())]
        raise RankDeficient(
            f"columns are collinear (R diagonal ratio {diag.min() / diag.max():.2e} "
            f"< {rank_tol:g}, worst column {worst!r})"
        )
    beta = _back_substitute(r, qty)

    fitted = x @ beta
    residuals = y - fitted
    df = n - k
    sse = float(residuals @ residuals)
    s2 = sse / df

    # (X'X)^-1 = R^-1 R^-T, so its diagonal is the squared row norms of R^-1
    r_inv = np.column_stack(
        [_back_substitute(r, e) for e in np.eye(k)]
    )
    se = np.sqrt(s2 * (r_inv**2).sum(axis=1))

    if design.has_intercept:
        sst = float(((y - y.mean()) ** 2).sum())
    else:
        sst = float((y**2).sum())
    r2 = 1.0 - sse / sst if sst > 0 else 1.0
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / df

    if design.has_intercept and k > 1:
        f_stat = (r2 / (k - 1)) / ((1.0 - r2) / df)
        f_df = (k - 1, df)
    else:
        f_stat, f_df = None, None

    t_stats = beta / se
    p_values = np.array([2.0 * (1.0 - t_cdf(abs(t), df)) for t in t_stats])

    names = design.column_names
    return OlsFit(
        column_names=names,
        coefficients=dict(zip(names, beta.tolist())),
        standard_errors=dict(zip(names, se.tolist())),
        t_stats=dict(zip(names, t_stats.tolist())),
        p_values=dict(zip(names, p_values.tolist())),
        r_squared=r2,
        adj_r_squared=adj_r2,
        residual_std_error=math.sqrt(s2),
        df_residual=df,
        f_statistic=f_stat,
        f_df=f_df,
        fitted=fitted,
        residuals=residuals,
        n=n,
        k=k,
    )


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    eps = 1e-16
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b) for a, b > 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # the continued fraction converges fast below the distribution mean
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_cdf(t: float, df: int) -> float:
    """P(T <= t) for Student's t with df degrees of freedom."""
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if t == 0.0:
        return 0.5
    tail = 0.5 * betainc_regularized(df / 2.0, 0.5, df / (df + t * t))
    return 1.0 - tail if t > 0 else tail


def stars(p: float) -> str:
    """Significance marker: *** p<0.01, ** p<0.05, * p<0.1, else empty."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.1:
        return "*"
    return ""
