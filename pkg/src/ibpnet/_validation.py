"""Small input-validation helpers shared across the package."""
from __future__ import annotations

import numpy as np


def as_rng(seed) -> np.random.Generator:
    """Turn ``seed`` (None, int, SeedSequence or Generator) into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def check_positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    return value


def check_nonnegative(name: str, value: float) -> float:
    value = float(value)
    if not value >= 0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")
    return value


def check_fitness_values(values, n: int | None = None) -> np.ndarray:
    """Validate a fitness vector: 1-d, strictly positive, optional length."""
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("fitness values must be a 1-d sequence")
    if n is not None and arr.size != n:
        raise ValueError(f"expected {n} fitness values, got {arr.size}")
    if arr.size and not np.all(arr > 0):
        raise ValueError("fitness values must be strictly positive")
    return arr
