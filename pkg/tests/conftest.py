import numpy as np
import pytest

from ibpnet import AttributeMatrix, ModelParams, UniformFitness, sample_matrix


@pytest.fixture
def tiny_matrix():
    # rows 0..3 over 6 features; hand-checkable
    return AttributeMatrix([[0, 1, 2], [0, 2, 3], [1, 3, 4, 5], [0, 4]])


@pytest.fixture
def small_random():
    params = ModelParams(alpha=2.0, beta=0.7)
    matrix, fitness = sample_matrix(params, UniformFitness(0.5, 1.5), 60, seed=42)
    return matrix, fitness, params


def random_instance(seed, n=40, alpha=2.0, beta=0.6, c=0.0, low=0.4, high=1.8):
    """Random (matrix, fitness, params) helper used by property-style tests."""
    params = ModelParams(alpha=alpha, beta=beta, c=c)
    matrix, fitness = sample_matrix(params, UniformFitness(low, high), n, seed=seed)
    return matrix, fitness, params


def assert_close(a, b, rtol=1e-9, atol=1e-12):
    assert np.isclose(a, b, rtol=rtol, atol=atol), f"{a!r} != {b!r}"
