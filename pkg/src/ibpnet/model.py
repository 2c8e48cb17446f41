"""Generative process for the attribute matrix.

Node 1 draws Poisson(alpha) fresh features.  Each later node n+1 re-adopts
every existing feature k independently with probability

    P_n(k) = (sum_{i<=n} r_i z_{i,k}) / (c + sum_{i<=n} r_i)

and adds Poisson(Lambda_n) fresh ones, Lambda_n = alpha / (sum_{i<=n} r_i)^(1-beta).
The per-node weights r_i are i.i.d. draws from a fitness distribution; larger
weights make a node's features more likely to be re-adopted later.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import as_rng, check_fitness_values
from .matrix import AttributeMatrix

__all__ = [
    "ModelParams",
    "new_feature_rate",
    "inclusion_probability",
    "sample_matrix",
    "sample_growth",
]


@dataclass(frozen=True)
class ModelParams:
    """Model parameters: alpha > 0, beta <= 1, offset c >= 0 (default 0)."""

    alpha: float
    beta: float
    c: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.beta <= 1:
            raise ValueError(f"beta must be <= 1, got {self.beta}")
        if not self.c >= 0:
            raise ValueError(f"c must be >= 0, got {self.c}")


def new_feature_rate(fitness_prefix, params: ModelParams) -> float:
    """Poisson mean for the number of fresh features of the next node.

    Equals ``alpha / s**(1-beta)`` with ``s`` the fitness sum of the nodes
    seen so far; for beta == 1 this is exactly alpha.
    """
    r = check_fitness_values(fitness_prefix)
    if r.size == 0:
        raise ValueError("need at least one observed node")
    if params.beta == 1.0:
        return params.alpha
    return params.alpha / float(r.sum()) ** (1.0 - params.beta)


def inclusion_probability(
    matrix: AttributeMatrix, fitness, k: int, c: float = 0.0, n_rows: int | None = None
) -> float:
    """Probability that the next node re-adopts feature ``k`` (0-based).

    Restricted to the first ``n_rows`` rows of the matrix (default: all).
    """
    n = matrix.n if n_rows is None else int(n_rows)
    if not 1 <= n <= matrix.n:
        raise ValueError(f"n_rows must be in [1, {matrix.n}]")
    if not 0 <= k < matrix.prefix_totals[n - 1]:
        raise ValueError(f"feature {k} does not exist after {n} rows")
    r = check_fitness_values(fitness)[:n]
    if r.size < n:
        raise ValueError("fitness vector shorter than the requested prefix")
    weight = 0.0
    for i in range(n):
        row = matrix.rows[i]
        pos = np.searchsorted(row, k)
        if pos < row.size and row[pos] == k:
            weight += r[i]
    return weight / (c + float(r.sum()))


def sample_matrix(params: ModelParams, dist, n: int, seed=None):
    """Draw (matrix, fitness) for ``n`` nodes; deterministic given ``seed``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = as_rng(seed)
    r = dist.sample(n, rng)
    alpha, beta, c = params.alpha, params.beta, params.c

    cap = max(64, int(4 * alpha) + 16)
    weights = np.zeros(cap, dtype=np.float64)  # per-feature adopted weight
    rows = []
    n1 = int(rng.poisson(alpha))
    rows.append(np.arange(n1, dtype=np.int64))
    total = n1
    if total > weights.size:
        weights = np.resize(weights, 2 * total)
    weights[:n1] = r[0]
    s = float(r[0])

    for i in range(1, n):
        probs = weights[:total] / (c + s)
        adopted = np.flatnonzero(rng.random(total) < probs)
        lam = alpha if beta == 1.0 else alpha / s ** (1.0 - beta)
        fresh = int(rng.poisson(lam))
        row = np.concatenate(
            [adopted, np.arange(total, total + fresh)]
        ).astype(np.int64)
        rows.append(row)
        if total + fresh > weights.size:
            weights = np.resize(weights, 2 * (total + fresh))
            weights[total:] = 0.0
        weights[adopted] += r[i]
        weights[total : total + fresh] = r[i]
        total += fresh
        s += float(r[i])

    return AttributeMatrix(rows, validate=False), r


def sample_growth(params: ModelParams, dist, n: int, seed=None) -> np.ndarray:
    """Sample only the growth curve L_1..L_n (total distinct features).

    The fresh-feature counts depend on the fitness draws but not on which
    existing features get re-adopted, so skipping the re-adoption sampling
    leaves the distribution of the curve unchanged.  Much faster than
    ``sample_matrix`` for large ``n``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = as_rng(seed)
    r = dist.sample(n, rng)
    s = np.cumsum(r)
    lam = np.empty(n, dtype=np.float64)
    lam[0] = params.alpha
    if n > 1:
        if params.beta == 1.0:
            lam[1:] = params.alpha
        else:
            lam[1:] = params.alpha / s[:-1] ** (1.0 - params.beta)
    counts = rng.poisson(lam)
    return np.cumsum(counts).astype(np.int64)
