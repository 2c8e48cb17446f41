"""Graph synthesis from an attribute matrix.

A symmetric feature-feature influence matrix turns shared features into a
node-pair weight w_ij = z_i' Xi z_j (for the identity influence this is the
shared-feature count).  The edge probability is a sigmoid of the weight,

    phi(w) = 1 / (exp(K*(theta - w)) + 1),

a step function at K = inf.  Three models:

FF    each pair gets an edge independently with probability phi(w_ij).
FFBA  nodes arrive in order; the probability mixes phi with a
      degree-proportional term: delta*phi + (1-delta)*D_j/(2m), both taken
      just before the arriving node adds its edges.
FFJR  an FF graph, after which every node may befriend one uniformly chosen
      neighbour-of-a-neighbour with probability 1-delta.

``calibrate_theta`` solves sum-over-pairs phi(w) = target for theta, giving
direct control of the expected edge count.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ._validation import as_rng
from .matrix import AttributeMatrix

__all__ = [
    "EdgeModel",
    "Graph",
    "sigmoid",
    "pair_weight",
    "weight_counts",
    "expected_edges",
    "calibrate_theta",
    "ff_edge_probabilities",
    "sample_ff",
    "sample_ffba",
    "sample_ffjr",
    "sample_graph",
]


class Graph:
    """Simple undirected graph: canonical (i < j) edge array, no self-loops."""

    __slots__ = ("n", "edges", "_adj")

    def __init__(self, n: int, edges):
        self.n = int(n)
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if np.any(e < 0) or np.any(e >= n):
                raise ValueError("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("self-loops are not allowed")
            e = np.sort(e, axis=1)
            e = np.unique(e, axis=0)
        self.edges = e
        self._adj = None

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=np.int64)
        if self.num_edges:
            np.add.at(d, self.edges[:, 0], 1)
            np.add.at(d, self.edges[:, 1], 1)
        return d

    def adjacency(self):
        """scipy CSR adjacency (symmetric, unit weights)."""
        if self._adj is None:
            i, j = (
                (self.edges[:, 0], self.edges[:, 1])
                if self.num_edges
                else (np.empty(0, int), np.empty(0, int))
            )
            data = np.ones(2 * i.size, dtype=np.int8)
            self._adj = sparse.csr_matrix(
                (data, (np.concatenate([i, j]), np.concatenate([j, i]))),
                shape=(self.n, self.n),
            )
        return self._adj

    def neighbor_lists(self) -> list[np.ndarray]:
        adj = self.adjacency()
        return [adj.indices[adj.indptr[v] : adj.indptr[v + 1]] for v in range(self.n)]

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges})"


@dataclass(frozen=True)
class EdgeModel:
    """Edge-probability model description.

    kind   "ff", "ffba" or "ffjr"
    K      sigmoid steepness (np.inf gives the hard threshold)
    theta  sigmoid threshold
    delta  mixing weight in [0, 1]; both mixed models degenerate to FF at 1
    xi     feature influence: None (identity), 1-d diagonal, or small dense
           symmetric matrix
    """

    kind: str
    K: float
    theta: float
    delta: float = 1.0
    xi: object = None

    def __post_init__(self):
        if self.kind not in ("ff", "ffba", "ffjr"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if not self.K > 0:
            raise ValueError("K must be positive (np.inf allowed)")
        if not 0 <= self.delta <= 1:
            raise ValueError("delta must lie in [0, 1]")
        if self.xi is not None:
            xi = np.asarray(self.xi)
            if xi.ndim == 2 and not np.allclose(xi, xi.T):
                raise ValueError("influence matrix must be symmetric")


def sigmoid(x, K: float, theta: float):
    """Edge probability phi(x); step function with midpoint 1/2 at K = inf."""
    x = np.asarray(x, dtype=np.float64)
    if np.isinf(K):
        out = np.where(x > theta, 1.0, np.where(x < theta, 0.0, 0.5))
        return float(out) if out.ndim == 0 else out
    # exp overflow is harmless here: 1/(inf+1) underflows to the correct 0
    with np.errstate(over="ignore"):
        out = 1.0 / (np.exp(K * (theta - x)) + 1.0)
    return float(out) if out.ndim == 0 else out


def pair_weight(matrix: AttributeMatrix, i: int, j: int, xi=None) -> float:
    """Weight of one node pair: z_i' Xi z_j (shared features for identity Xi)."""
    if i == j:
        raise ValueError("pair weight is defined for distinct nodes")
    a, b = matrix.rows[i], matrix.rows[j]
    if xi is None:
        return float(np.intersect1d(a, b, assume_unique=True).size)
    xi = np.asarray(xi, dtype=np.float64)
    if xi.ndim == 1:
        shared = np.intersect1d(a, b, assume_unique=True)
        return float(xi[shared].sum())
    return float(xi[np.ix_(a, b)].sum())


def _weight_sparse(matrix: AttributeMatrix, xi=None) -> sparse.csr_matrix:
    """Node-node weight matrix Z Xi Z' as sparse CSR (dense Xi allowed, small)."""
    z = matrix.to_sparse()
    if xi is None:
        return (z @ z.T).tocsr()
    xi = np.asarray(xi, dtype=np.float64)
    if xi.ndim == 1:
        if xi.size != matrix.n_features:
            raise ValueError("diagonal influence has wrong length")
        return (z.multiply(xi[None, :]) @ z.T).tocsr()
    if xi.shape != (matrix.n_features, matrix.n_features):
        raise ValueError("influence matrix has wrong shape")
    return sparse.csr_matrix(z @ (xi @ z.T.toarray()))


def weight_counts(matrix: AttributeMatrix, xi=None):
    """Multiset of upper-triangle pair weights as (values, counts).

    The (usually dominant) zero-weight pair count is included, so counts sum
    to n*(n-1)/2.
    """
    w = sparse.triu(_weight_sparse(matrix, xi), k=1).tocoo()
    vals = w.data[w.data != 0.0]
    values, counts = np.unique(vals, return_counts=True)
    pairs = matrix.n * (matrix.n - 1) // 2
    zeros = pairs - vals.size
    if zeros:
        values = np.concatenate([[0.0], values])
        counts = np.concatenate([[zeros], counts])
    return values, counts


def expected_edges(values, counts, K: float, theta: float) -> float:
    """Sum of phi over the pair-weight multiset."""
    return float((counts * sigmoid(values, K, theta)).sum())


def calibrate_theta(
    matrix: AttributeMatrix, K: float, target_m: float, xi=None, rtol: float = 1e-9
) -> float:
    """Solve sum-over-pairs phi(w) = target_m for theta.

    The expected edge count is strictly decreasing in theta, so the root is
    unique; Newton steps are safeguarded by a shrinking bisection bracket.
    At K = inf the expectation is a step function of theta and the equation
    generally has no exact root: the returned theta is the inter-weight
    midpoint whose deterministic edge count is closest to the target.

    A target of 0 or of all pairs has no finite solution; +/-inf is returned
    with a warning.
    """
    n = matrix.n
    pairs = n * (n - 1) // 2
    if not 0 <= target_m <= pairs:
        raise ValueError(f"target_m must lie in [0, {pairs}]")
    values, counts = weight_counts(matrix, xi)
    if target_m == 0:
        warnings.warn("target of 0 edges: returning theta = +inf")
        return float("inf")
    if target_m == pairs:
        warnings.warn("target of all pairs: returning theta = -inf")
        return float("-inf")

    if np.isinf(K):
        # deterministic edges above theta: pick the midpoint with the count
        # closest to the target
        desc = np.argsort(values)[::-1]
        above = np.cumsum(counts[desc])
        best = int(np.argmin(np.abs(above - target_m)))
        v_desc = values[desc]
        if best + 1 < v_desc.size:
            return float(0.5 * (v_desc[best] + v_desc[best + 1]))
        return float(v_desc[best] - 1.0)

    span = 36.9 / K  # phi saturates to within 1e-16 at this distance
    lo = float(values.min()) - span
    hi = float(values.max()) + span
    # start from the theta that would hit the target if every weight were 0
    theta = float(np.clip(np.log(pairs / target_m - 1.0) / K, lo, hi))
    tol = rtol * target_m
    for _ in range(200):
        p = sigmoid(values, K, theta)
        f = float((counts * p).sum()) - target_m
        if abs(f) <= tol:
            return theta
        if f > 0:
            lo = theta
        else:
            hi = theta
        fprime = -K * float((counts * p * (1.0 - p)).sum())
        step = f / fprime if fprime < 0 else np.nan
        nxt = theta - step if np.isfinite(step) else np.nan
        theta = nxt if np.isfinite(nxt) and lo < nxt < hi else 0.5 * (lo + hi)
    raise RuntimeError("theta calibration did not converge")


def _upper_pairs(matrix: AttributeMatrix, xi=None):
    w = sparse.triu(_weight_sparse(matrix, xi), k=1).tocoo()
    keep = w.data != 0.0
    return w.row[keep], w.col[keep], w.data[keep]


def _sample_zero_weight_pairs(n, count, nonzero_set, rng):
    """Uniformly choose `count` distinct pairs among those with zero weight."""
    chosen = set()
    out = np.empty((count, 2), dtype=np.int64)
    got = 0
    while got < count:
        batch = max(64, 2 * (count - got))
        a = rng.integers(0, n, size=batch)
        b = rng.integers(0, n, size=batch)
        for x, y in zip(a, b):
            if x == y:
                continue
            i, j = (x, y) if x < y else (y, x)
            key = i * n + j
            if key in nonzero_set or key in chosen:
                continue
            chosen.add(key)
            out[got] = (i, j)
            got += 1
            if got == count:
                break
    return out


def sample_ff(matrix: AttributeMatrix, model: EdgeModel, seed=None) -> Graph:
    """Independent per-pair edges with probability phi(w)."""
    rng = as_rng(seed)
    n = matrix.n
    ii, jj, ww = _upper_pairs(matrix, model.xi)
    p = sigmoid(ww, model.K, model.theta)
    keep = rng.random(ww.size) < p
    parts = [np.column_stack([ii[keep], jj[keep]])]

    p0 = float(sigmoid(0.0, model.K, model.theta))
    if p0 > 0.0:
        zero_pairs = n * (n - 1) // 2 - ww.size
        extra = rng.binomial(zero_pairs, p0) if zero_pairs else 0
        if extra:
            nonzero = {int(i) * n + int(j) for i, j in zip(ii, jj)}
            parts.append(_sample_zero_weight_pairs(n, extra, nonzero, rng))
    parts = [p for p in parts if p.size]
    edges = np.concatenate(parts) if parts else np.empty((0, 2), dtype=np.int64)
    return Graph(n, edges)


def ff_edge_probabilities(matrix: AttributeMatrix, model: EdgeModel) -> np.ndarray:
    """Dense lower-triangle probability table of the FF model (small n only)."""
    n = matrix.n
    w = np.zeros((n, n))
    ii, jj, ww = _upper_pairs(matrix, model.xi)
    w[ii, jj] = ww
    w[jj, ii] = ww
    p = sigmoid(w, model.K, model.theta)
    p[np.triu_indices(n)] = 0.0
    return p


def sample_ffba(
    matrix: AttributeMatrix, model: EdgeModel, seed=None, return_probabilities=False
):
    """Sequential arrival mixing feature probability with degree popularity.

    Before any edge exists the degree term is 0/0; it is defined as 0 so the
    first arrivals rely on features alone.
    """
    rng = as_rng(seed)
    n = matrix.n
    delta = model.delta
    wmat = _weight_sparse(matrix, model.xi)
    degrees = np.zeros(n, dtype=np.int64)
    m_edges = 0
    edges = []
    probs = np.zeros((n, n)) if return_probabilities else None
    for i in range(1, n):
        row = np.asarray(wmat[[i], :i].todense()).ravel()
        p = delta * sigmoid(row, model.K, model.theta)
        if m_edges > 0:
            p = p + (1.0 - delta) * degrees[:i] / (2.0 * m_edges)
        p = np.clip(p, 0.0, 1.0)
        if return_probabilities:
            probs[i, :i] = p
        hit = np.flatnonzero(rng.random(i) < p)
        for j in hit:
            edges.append((int(j), i))
        degrees[hit] += 1
        degrees[i] += hit.size
        m_edges += hit.size
    g = Graph(n, edges)
    return (g, probs) if return_probabilities else g


def sample_ffjr(matrix: AttributeMatrix, model: EdgeModel, seed=None) -> Graph:
    """FF graph plus friend-of-friend closure.

    Every node looks at the neighbours of its neighbours in the FF graph
    (itself excluded); if the set is nonempty one member is chosen uniformly
    and the edge added with probability 1 - delta.  Nodes are processed in
    index order against the *original* FF adjacency.
    """
    rng = as_rng(seed)
    base = sample_ff(matrix, model, rng)
    nbrs = base.neighbor_lists()
    extra = []
    for i in range(matrix.n):
        if nbrs[i].size == 0:
            continue
        two_hop = np.unique(np.concatenate([nbrs[j] for j in nbrs[i]]))
        two_hop = two_hop[two_hop != i]
        if two_hop.size == 0:
            continue
        target = int(two_hop[rng.integers(two_hop.size)])
        if rng.random() < 1.0 - model.delta:
            extra.append((i, target))
    if not extra:
        return base
    edges = np.concatenate([base.edges, np.asarray(extra, dtype=np.int64)])
    return Graph(matrix.n, edges)


def sample_graph(matrix: AttributeMatrix, model: EdgeModel, seed=None) -> Graph:
    if model.kind == "ff":
        return sample_ff(matrix, model, seed)
    if model.kind == "ffba":
        return sample_ffba(matrix, model, seed)
    return sample_ffjr(matrix, model, seed)
