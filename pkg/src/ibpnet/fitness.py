"""Fitness distributions: descriptors for the per-node positive weights.

All supported families have strictly positive support, a closed-form mean
and a finite second moment.  Instances are immutable value objects.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import as_rng

__all__ = [
    "UniformFitness",
    "TwoPointFitness",
    "ZipfFitness",
    "parse_fitness",
]


@dataclass(frozen=True)
class UniformFitness:
    """Uniform on the interval [low, high]; low == high is the point mass."""

    low: float
    high: float

    def __post_init__(self):
        if not 0 < self.low <= self.high:
            raise ValueError(f"need 0 < low <= high, got [{self.low}, {self.high}]")

    @property
    def mean(self) -> float:
        return 0.5 * (self.low + self.high)

    @property
    def lower_bound(self) -> float:
        return self.low

    def sample(self, n: int, rng=None) -> np.ndarray:
        rng = as_rng(rng)
        if self.low == self.high:
            return np.full(n, self.low, dtype=np.float64)
        return rng.uniform(self.low, self.high, size=n)

    def spec_string(self) -> str:
        return f"uniform:{self.low!r}:{self.high!r}"


@dataclass(frozen=True)
class TwoPointFitness:
    """Two-valued distribution: value1 with probability p, else value2."""

    value1: float
    value2: float
    p: float = 0.5

    def __post_init__(self):
        if min(self.value1, self.value2) <= 0:
            raise ValueError("both support values must be positive")
        if not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    @property
    def mean(self) -> float:
        return self.p * self.value1 + (1 - self.p) * self.value2

    @property
    def lower_bound(self) -> float:
        return min(self.value1, self.value2)

    def sample(self, n: int, rng=None) -> np.ndarray:
        rng = as_rng(rng)
        pick = rng.random(n) < self.p
        return np.where(pick, self.value1, self.value2).astype(np.float64)

    def spec_string(self) -> str:
        return f"twopoint:{self.value1!r}:{self.value2!r}:{self.p!r}"


@dataclass(frozen=True)
class ZipfFitness:
    """Discrete power law on ranks 1..n_values: P(rank k) proportional to k^-exponent.

    The fitness value attached to rank k is k itself; with ``normalized``
    the values are divided by the distribution mean so the mean becomes 1.
    """

    exponent: float
    n_values: int
    normalized: bool = True

    def __post_init__(self):
        if self.n_values < 1:
            raise ValueError("n_values must be >= 1")
        if self.exponent <= 0:
            raise ValueError("exponent must be positive")

    def _support(self):
        ranks = np.arange(1, self.n_values + 1, dtype=np.float64)
        probs = ranks ** (-self.exponent)
        probs /= probs.sum()
        values = ranks
        if self.normalized:
            values = values / float(probs @ ranks)
        return values, probs

    @property
    def mean(self) -> float:
        values, probs = self._support()
        return float(probs @ values)

    @property
    def lower_bound(self) -> float:
        return float(self._support()[0][0])

    def sample(self, n: int, rng=None) -> np.ndarray:
        rng = as_rng(rng)
        values, probs = self._support()
        return values[rng.choice(self.n_values, size=n, p=probs)]

    def spec_string(self) -> str:
        tag = "norm" if self.normalized else "raw"
        return f"zipf:{self.exponent!r}:{self.n_values}:{tag}"


def parse_fitness(spec: str):
    """Parse a colon-separated fitness descriptor.

    Accepted forms::

        uniform:LO:HI
        twopoint:V1:V2[:P]
        zipf:EXPONENT:NVALUES[:norm|:raw]
    """
    parts = spec.strip().split(":")
    kind, args = parts[0].lower(), parts[1:]
    try:
        if kind == "uniform" and len(args) == 2:
            return UniformFitness(float(args[0]), float(args[1]))
        if kind == "twopoint" and len(args) in (2, 3):
            p = float(args[2]) if len(args) == 3 else 0.5
            return TwoPointFitness(float(args[0]), float(args[1]), p)
        if kind == "zipf" and len(args) in (2, 3):
            norm = True
            if len(args) == 3:
                if args[2] not in ("norm", "raw"):
                    raise ValueError(f"unknown zipf flag {args[2]!r}")
                norm = args[2] == "norm"
            return ZipfFitness(float(args[0]), int(args[1]), norm)
    except ValueError as exc:
        raise ValueError(f"invalid fitness spec {spec!r}: {exc}") from None
    raise ValueError(f"invalid fitness spec {spec!r}")
