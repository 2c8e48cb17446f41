"""Left-ordered binary attribute matrices and their on-disk format.

Rows are nodes, columns are features.  Feature ids are assigned in order of
first appearance, so the new features of row ``i`` occupy the contiguous id
block ``[L[i-1], L[i])`` where ``L`` is the running count of distinct
features.  Rows never change once created; the whole structure is immutable
for practical purposes and safe to share between threads/processes.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "AttributeMatrix",
    "save_matrix",
    "load_matrix",
    "save_fitness",
    "load_fitness",
]


class AttributeMatrix:
    """Sparse left-ordered binary node-by-feature matrix.

    Parameters
    ----------
    rows : sequence of int sequences
        Sorted feature ids per node, in node-arrival order (0-based ids).
    validate : bool
        Check the left-ordering invariants on construction.
    """

    __slots__ = ("rows", "new_counts", "prefix_totals", "_indptr", "_indices")

    def __init__(self, rows, validate: bool = True):
        self.rows = [np.ascontiguousarray(r, dtype=np.int64) for r in rows]
        n = len(self.rows)
        new_counts = np.zeros(n, dtype=np.int64)
        prefix = np.zeros(n, dtype=np.int64)
        total = 0
        for i, row in enumerate(self.rows):
            new_counts[i] = int(np.count_nonzero(row >= total))
            total += new_counts[i]
            prefix[i] = total
        self.new_counts = new_counts
        self.prefix_totals = prefix
        self._indptr = None
        self._indices = None
        if validate:
            self.validate()

    # -- basic shape -----------------------------------------------------

    @property
    def n(self) -> int:
        """Number of nodes (rows)."""
        return len(self.rows)

    @property
    def n_features(self) -> int:
        """Total number of distinct features observed."""
        return int(self.prefix_totals[-1]) if self.rows else 0

    @property
    def ones_count(self) -> int:
        return int(sum(r.size for r in self.rows))

    @property
    def density(self) -> float:
        cells = self.n * self.n_features
        return self.ones_count / cells if cells else 0.0

    def validate(self) -> None:
        """Raise ValueError unless the matrix is left-ordered."""
        prev_total = 0
        for i, row in enumerate(self.rows):
            if row.size and (np.any(np.diff(row) <= 0) or row[0] < 0):
                raise ValueError(f"row {i} is not a sorted set of ids")
            total = int(self.prefix_totals[i])
            # the fresh block [prev_total, total) must be fully present and
            # nothing at or beyond `total` may appear
            fresh = row[row >= prev_total]
            if fresh.size != total - prev_total or (
                fresh.size and (fresh[0] != prev_total or fresh[-1] != total - 1)
            ):
                raise ValueError(
                    f"row {i} breaks left-ordering: new ids must be the "
                    f"contiguous block [{prev_total}, {total})"
                )
            prev_total = total

    # -- views -----------------------------------------------------------

    def csr(self):
        """Return (indptr, indices) describing the rows in CSR form."""
        if self._indptr is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            indptr[1:] = np.cumsum([r.size for r in self.rows])
            indices = (
                np.concatenate(self.rows)
                if self.ones_count
                else np.empty(0, dtype=np.int64)
            )
            self._indptr, self._indices = indptr, indices
        return self._indptr, self._indices

    def to_sparse(self):
        """scipy CSR matrix of float64 zeros/ones (n x n_features)."""
        from scipy import sparse

        indptr, indices = self.csr()
        data = np.ones(indices.size, dtype=np.float64)
        return sparse.csr_matrix(
            (data, indices, indptr), shape=(self.n, self.n_features)
        )

    def to_dense(self) -> np.ndarray:
        """Dense boolean array; only sensible for small matrices."""
        out = np.zeros((self.n, self.n_features), dtype=bool)
        for i, row in enumerate(self.rows):
            out[i, row] = True
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, AttributeMatrix):
            return NotImplemented
        return self.n == other.n and all(
            np.array_equal(a, b) for a, b in zip(self.rows, other.rows)
        )

    def __repr__(self) -> str:
        return f"AttributeMatrix(n={self.n}, n_features={self.n_features})"


# -- file format ---------------------------------------------------------
#
# Line 1 header: "n L alpha beta c seed" with `?` for unknown fields.
# Then one line per row: the row's feature ids, ascending, space-separated
# (an empty row is an empty line).  Ids are 0-based.

_HEADER_FIELDS = ("alpha", "beta", "c", "seed")


def _fmt_meta(value) -> str:
    if value is None:
        return "?"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def save_matrix(path, matrix: AttributeMatrix, **meta) -> None:
    """Write a matrix file; meta may give alpha, beta, c, seed."""
    unknown = set(meta) - set(_HEADER_FIELDS)
    if unknown:
        raise ValueError(f"unknown metadata fields: {sorted(unknown)}")
    fields = [str(matrix.n), str(matrix.n_features)]
    fields += [_fmt_meta(meta.get(k)) for k in _HEADER_FIELDS]
    with open(path, "w") as fh:
        fh.write(" ".join(fields) + "\n")
        for row in matrix.rows:
            fh.write(" ".join(map(str, row.tolist())) + "\n")


def load_matrix(path):
    """Read a matrix file, returning (AttributeMatrix, metadata dict)."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 6:
            raise ValueError(f"{path}: malformed header {header!r}")
        n = int(header[0])
        meta = {}
        for name, tok in zip(_HEADER_FIELDS, header[2:]):
            if tok == "?":
                meta[name] = None
            elif name == "seed":
                meta[name] = int(tok)
            else:
                meta[name] = float(tok)
        rows = []
        for _ in range(n):
            line = fh.readline()
            if line == "":
                raise ValueError(f"{path}: fewer rows than the header claims")
            rows.append([int(t) for t in line.split()])
    matrix = AttributeMatrix(rows)
    if matrix.n_features != int(header[1]):
        raise ValueError(
            f"{path}: header claims {header[1]} features, "
            f"rows contain {matrix.n_features}"
        )
    return matrix, meta


def save_fitness(path, values) -> None:
    """One float per line, index-aligned with the matrix rows."""
    with open(path, "w") as fh:
        for v in np.asarray(values, dtype=np.float64):
            fh.write(repr(float(v)) + "\n")


def load_fitness(path) -> np.ndarray:
    with open(path) as fh:
        return np.array([float(line) for line in fh if line.strip()], dtype=np.float64)
