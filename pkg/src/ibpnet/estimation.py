"""Estimators for the growth parameters read off the curve L_1..L_n.

For beta in (0, 1] the distinct-feature count grows like a power law
L_n ~ lambda * n^beta, for beta = 0 like lambda * ln n.  The exponent is
estimated as the OLS slope in the log-log plot; the level is estimated from
the slope of L against n^beta (or ln n) and converted back to alpha when the
mean fitness is known, otherwise to alpha' = alpha / mean^(1-beta).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .matrix import AttributeMatrix
from .model import ModelParams

__all__ = [
    "EstimationResult",
    "growth_curve",
    "default_fit_range",
    "estimate_beta",
    "estimate_alpha",
    "estimate_parameters",
    "clt_statistic",
    "scaling_sequence",
    "growth_limit",
    "GrowthEstimator",
]

# below this estimated exponent the logarithmic-growth branch is used
LOG_REGIME_BETA = 0.05


def growth_curve(matrix_or_curve) -> np.ndarray:
    """Return the curve L_1..L_n (float array; counts for real matrices)."""
    if isinstance(matrix_or_curve, AttributeMatrix):
        return matrix_or_curve.prefix_totals.astype(np.float64)
    curve = np.asarray(matrix_or_curve, dtype=np.float64)
    if curve.ndim != 1 or curve.size == 0:
        raise ValueError("growth curve must be a nonempty 1-d sequence")
    return curve


def default_fit_range(n: int) -> tuple[int, int]:
    """Node-index interval used for regression: skip the early transient.

    Discards the first ``max(10, n // 10)`` points (1-based, inclusive ends).
    """
    lo = max(10, n // 10) + 1
    return (min(lo, n), n)


def _fit_points(curve, fit_range, log_length: bool):
    n = curve.size
    if fit_range is None:
        fit_range = default_fit_range(n)
    lo, hi = int(fit_range[0]), int(fit_range[1])
    if not 1 <= lo <= hi <= n:
        raise ValueError(f"fit range ({lo}, {hi}) out of bounds for n={n}")
    idx = np.arange(lo, hi + 1, dtype=np.float64)
    vals = curve[lo - 1 : hi].astype(np.float64)
    keep = vals >= 1  # log of the curve needs L_i >= 1
    idx, vals = idx[keep], vals[keep]
    if idx.size < 10:
        raise ValueError("fit range must contain at least 10 points with L_i >= 1")
    y = np.log(vals) if log_length else vals
    return idx, y, (lo, hi)


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Slope and r^2 of the simple least-squares line y = a + b x."""
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise ValueError("degenerate fit range: all abscissae equal")
    slope = float(xc @ yc) / sxx
    syy = float(yc @ yc)
    r2 = 1.0 if syy == 0.0 else (float(xc @ yc) ** 2) / (sxx * syy)
    return slope, r2


def estimate_beta(curve, fit_range=None) -> tuple[float, float]:
    """OLS slope of ln L_i against ln i; returns (beta_hat, r2).

    The value is reported unclamped even when it falls outside [0, 1].
    """
    curve = growth_curve(curve)
    idx, logl, _ = _fit_points(curve, fit_range, log_length=True)
    return _ols(np.log(idx), logl)


def estimate_alpha(curve, beta: float, mean_fitness=None, fit_range=None) -> float:
    """Estimate alpha (or alpha' when ``mean_fitness`` is None).

    Fits the slope gamma of L_i against ln i (logarithmic regime,
    beta < 0.05) or against i**beta, then scales:

    ==============  =======================  ==================
    regime          alpha (mean known)       alpha' (unknown)
    ==============  =======================  ==================
    logarithmic     mean * gamma             gamma
    power law       beta * mean^(1-beta)*g   beta * gamma
    ==============  =======================  ==================
    """
    if not 0 <= beta <= 1:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    curve = growth_curve(curve)
    idx, vals, _ = _fit_points(curve, fit_range, log_length=False)
    log_regime = beta < LOG_REGIME_BETA
    x = np.log(idx) if log_regime else idx**beta
    gamma, _ = _ols(x, vals)
    if log_regime:
        return float(mean_fitness) * gamma if mean_fitness is not None else gamma
    if mean_fitness is not None:
        return beta * float(mean_fitness) ** (1.0 - beta) * gamma
    return beta * gamma


@dataclass(frozen=True)
class EstimationResult:
    beta_hat: float
    alpha_prime_hat: float
    alpha_hat: float | None
    fit_range: tuple[int, int]
    r2: float


def estimate_parameters(
    matrix_or_curve, mean_fitness=None, fit_range=None
) -> EstimationResult:
    """Chain the two regressions: beta_hat first, then alpha' (and alpha)."""
    curve = growth_curve(matrix_or_curve)
    if fit_range is None:
        fit_range = default_fit_range(curve.size)
    beta_hat, r2 = estimate_beta(curve, fit_range)
    beta_used = min(max(beta_hat, 0.0), 1.0)
    alpha_prime = estimate_alpha(curve, beta_used, None, fit_range)
    alpha_hat = (
        estimate_alpha(curve, beta_used, mean_fitness, fit_range)
        if mean_fitness is not None
        else None
    )
    return EstimationResult(beta_hat, alpha_prime, alpha_hat, tuple(fit_range), r2)


def scaling_sequence(beta: float, n: int) -> float:
    """Normalisation a_n: ln n in the logarithmic regime, n^beta otherwise."""
    if not 0 <= beta <= 1:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    return math.log(n) if beta == 0 else float(n) ** beta


def growth_limit(params: ModelParams, mean_fitness: float) -> float:
    """Limit lambda of L_n / a_n: alpha/mean for beta=0, else alpha/(beta*mean^(1-beta))."""
    beta = params.beta
    if not 0 <= beta <= 1:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    if beta == 0:
        return params.alpha / mean_fitness
    return params.alpha / (beta * mean_fitness ** (1.0 - beta))


def clt_statistic(curve, params: ModelParams, mean_fitness: float) -> float:
    """Centred, scaled growth statistic sqrt(a_n) * (L_n/a_n - lambda).

    Converges in distribution to N(0, lambda); useful as a diagnostic of
    whether an observed curve is compatible with the model.
    """
    curve = growth_curve(curve)
    n = curve.size
    a_n = scaling_sequence(params.beta, n)
    lam = growth_limit(params, mean_fitness)
    return math.sqrt(a_n) * (float(curve[-1]) / a_n - lam)


class GrowthEstimator(BaseEstimator):
    """Growth-curve parameter estimator with the scikit-learn protocol.

    Parameters
    ----------
    mean_fitness : float or None
        Known mean of the fitness distribution; enables ``alpha_``.
    fit_range : None, "full" or (lo, hi)
        Regression window (1-based node indices).  None picks the default
        transient-skipping window, "full" uses every point.

    Attributes (after ``fit``)
    --------------------------
    beta_ : float            unclamped slope estimate
    alpha_prime_ : float     normalised level estimate
    alpha_ : float or None   level estimate, only with ``mean_fitness``
    r2_ : float              regression goodness of fit
    fit_range_ : tuple       window actually used
    """

    def __init__(self, mean_fitness=None, fit_range=None):
        self.mean_fitness = mean_fitness
        self.fit_range = fit_range

    def fit(self, X, y=None):
        curve = growth_curve(X)
        fit_range = self.fit_range
        if fit_range == "full":
            fit_range = (1, curve.size)
        result = estimate_parameters(curve, self.mean_fitness, fit_range)
        self.curve_ = curve
        self.beta_ = result.beta_hat
        self.alpha_prime_ = result.alpha_prime_hat
        self.alpha_ = result.alpha_hat
        self.r2_ = result.r2
        self.fit_range_ = result.fit_range
        return self
