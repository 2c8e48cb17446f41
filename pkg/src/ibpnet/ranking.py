"""Rank-agreement metrics between true and recovered fitness vectors.

Plain Kendall tau (tie-corrected, the tau-b convention) plus two weighted
variants with additive hyperbolic weights 1/(1+rank): one ranks by node
position (older nodes count more), one by the true value (higher-fitness
nodes count more).  All three are invariant under strictly increasing
transforms of either vector and live in [-1, 1]; an all-tied input makes
the coefficient undefined and is reported as nan.
"""
from __future__ import annotations

import numpy as np
from scipy import stats

__all__ = [
    "kendall_tau",
    "weighted_tau_by_position",
    "weighted_tau_by_value",
    "rank_report",
]


def _prepare(truth, estimate, k_n=None):
    truth = np.asarray(truth, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    if truth.shape != estimate.shape or truth.ndim != 1:
        raise ValueError("truth and estimate must be 1-d vectors of equal length")
    if k_n is not None:
        k_n = int(k_n)
        if not 2 <= k_n <= truth.size:
            raise ValueError(f"k_n must lie in [2, {truth.size}]")
        truth, estimate = truth[:k_n], estimate[:k_n]
    elif truth.size < 2:
        raise ValueError("need at least two entries")
    return truth, estimate


def kendall_tau(truth, estimate, k_n=None) -> float:
    """Kendall's tau-b over the first ``k_n`` coordinates (nan if undefined)."""
    truth, estimate = _prepare(truth, estimate, k_n)
    if np.all(truth == truth[0]) or np.all(estimate == estimate[0]):
        return float("nan")
    return float(stats.kendalltau(truth, estimate).statistic)


def weighted_tau_by_position(truth, estimate, k_n=None) -> float:
    """Weighted tau with hyperbolic decay in node position (index).

    The element at position p carries rank p, hence weight 1/(1+p): the
    oldest nodes dominate the statistic.
    """
    truth, estimate = _prepare(truth, estimate, k_n)
    return float(stats.weightedtau(truth, estimate, rank=False).statistic)


def weighted_tau_by_value(truth, estimate, k_n=None) -> float:
    """Weighted tau with hyperbolic decay in the true-fitness ranking.

    The node with the largest true value carries rank 0, hence the largest
    weight; errors among the high-fitness nodes are penalised most.
    """
    truth, estimate = _prepare(truth, estimate, k_n)
    order = np.argsort(-truth, kind="stable")
    rank = np.empty(truth.size, dtype=np.intp)
    rank[order] = np.arange(truth.size)
    return float(stats.weightedtau(truth, estimate, rank=rank).statistic)


def rank_report(truth, estimate, k_values=None) -> dict:
    """All three metrics for each prefix size in ``k_values``.

    Defaults to the prefixes floor(sqrt(n)), n // 2 and n.
    """
    truth = np.asarray(truth, dtype=np.float64)
    n = truth.size
    if k_values is None:
        k_values = sorted({int(np.sqrt(n)), n // 2, n})
    out = {}
    for k in k_values:
        out[int(k)] = {
            "kendall_tau": kendall_tau(truth, estimate, k),
            "weighted_tau_position": weighted_tau_by_position(truth, estimate, k),
            "weighted_tau_value": weighted_tau_by_value(truth, estimate, k),
        }
    return out
