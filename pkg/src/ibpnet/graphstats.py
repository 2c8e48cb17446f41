"""Topology diagnostics: degree histogram, reachability, distance profile.

Distances are unweighted shortest paths.  The exact mode runs a BFS from
every node (fine up to ~10^4 nodes); the sampled mode estimates the same
quantities unbiasedly from a uniform subset of source nodes.  Pair counts
use unordered node pairs without self-pairs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csgraph

from ._validation import as_rng
from .graphgen import Graph

__all__ = ["TopologyReport", "degree_distribution", "distance_profile"]


@dataclass(frozen=True)
class TopologyReport:
    degree_histogram: dict  # degree -> node count; values sum to n
    reachable_fraction: float
    distance_cdf: np.ndarray  # cdf[k] = fraction of pairs at distance <= k
    method: str

    @property
    def max_distance(self) -> int:
        return len(self.distance_cdf) - 1


def degree_distribution(g: Graph) -> dict:
    """Exact degree histogram as {degree: count}."""
    counts = np.bincount(g.degrees())
    return {int(d): int(c) for d, c in enumerate(counts) if c}


def _distance_histogram(g: Graph, sources: np.ndarray) -> np.ndarray:
    """hist[k] = number of (source, other) ordered pairs at distance k >= 1."""
    adj = g.adjacency()
    hist = np.zeros(1, dtype=np.int64)
    step = max(1, min(512, (1 << 22) // max(g.n, 1)))
    for base in range(0, sources.size, step):
        idx = sources[base : base + step]
        dist = csgraph.dijkstra(adj, indices=idx, unweighted=True)
        finite = dist[np.isfinite(dist) & (dist > 0)].astype(np.int64)
        if finite.size:
            top = int(finite.max())
            if top >= hist.size:
                hist = np.concatenate([hist, np.zeros(top + 1 - hist.size, np.int64)])
            hist += np.bincount(finite, minlength=hist.size)
    return hist


def distance_profile(g: Graph, sources: int | None = None, seed=None) -> TopologyReport:
    """Reachable-pair fraction and distance CDF.

    ``sources=None`` computes exact values from all-source BFS; an integer
    runs BFS from that many uniformly sampled sources and scales up.  The
    CDF's last entry equals the reachable fraction by construction.
    """
    n = g.n
    if n < 2:
        return TopologyReport(degree_distribution(g), 0.0, np.zeros(1), "exact")
    if sources is None:
        src = np.arange(n)
        per_source = float(n) * (n - 1)
        method = "exact"
    else:
        sources = int(sources)
        if sources < 1:
            raise ValueError("need at least one sampled source")
        rng = as_rng(seed)
        src = rng.choice(n, size=min(sources, n), replace=False)
        per_source = float(src.size) * (n - 1)
        method = f"sampled({src.size})"
    hist = _distance_histogram(g, src)
    cdf = np.cumsum(hist) / per_source
    return TopologyReport(
        degree_histogram=degree_distribution(g),
        reachable_fraction=float(cdf[-1]),
        distance_cdf=cdf,
        method=method,
    )
