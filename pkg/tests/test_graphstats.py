import numpy as np
import pytest

from ibpnet import Graph, degree_distribution, distance_profile


def complete_graph(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


class TestDegreeDistribution:
    def test_complete_graph(self):
        assert degree_distribution(complete_graph(4)) == {3: 4}

    def test_path_graph(self):
        g = Graph(3, [(0, 1), (1, 2)])
        assert degree_distribution(g) == {1: 2, 2: 1}

    def test_counts_sum_to_nodes_and_edges(self):
        rng = np.random.default_rng(0)
        edges = {(int(a), int(b)) for a, b in rng.integers(0, 30, (60, 2)) if a != b}
        g = Graph(30, sorted(edges))
        hist = degree_distribution(g)
        assert sum(hist.values()) == 30
        assert sum(d * c for d, c in hist.items()) == 2 * g.num_edges


class TestDistanceProfile:
    def test_connected_graph_fully_reachable(self):
        report = distance_profile(complete_graph(5))
        assert report.reachable_fraction == 1.0
        assert report.distance_cdf.tolist() == [0.0, 1.0]

    def test_two_components_enumeration(self):
        g = Graph(4, [(0, 1), (2, 3)])
        report = distance_profile(g)
        assert np.isclose(report.reachable_fraction, 1.0 / 3.0, rtol=1e-12)

    def test_cdf_monotone_and_peaks_at_reachable_fraction(self):
        rng = np.random.default_rng(1)
        edges = {(int(a), int(b)) for a, b in rng.integers(0, 60, (70, 2)) if a != b}
        g = Graph(60, sorted(edges))
        report = distance_profile(g)
        assert np.all(np.diff(report.distance_cdf) >= 0)
        assert report.distance_cdf[-1] == report.reachable_fraction

    def test_path_graph_distances(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3)])
        report = distance_profile(g)
        # pairs at distance 1: 3, distance 2: 2, distance 3: 1, of 6 total
        assert np.allclose(report.distance_cdf, [0, 3 / 6, 5 / 6, 1.0], rtol=1e-12)

    def test_empty_graph(self):
        g = Graph(5, np.empty((0, 2), dtype=np.int64))
        report = distance_profile(g)
        assert report.reachable_fraction == 0.0

    def test_sampled_mode_agrees_with_exact(self):
        rng = np.random.default_rng(2)
        n = 300
        edges = {(int(a), int(b)) for a, b in rng.integers(0, n, (500, 2)) if a != b}
        g = Graph(n, sorted(edges))
        exact = distance_profile(g)
        sampled = distance_profile(g, sources=120, seed=9)
        assert sampled.method == "sampled(120)"
        # binomial-ish error bound over sources: three standard errors
        p = exact.reachable_fraction
        se = np.sqrt(p * (1 - p) / 120) + 1e-9
        assert abs(sampled.reachable_fraction - p) <= 3 * se + 0.02
        k = min(len(exact.distance_cdf), len(sampled.distance_cdf)) - 1
        assert abs(sampled.distance_cdf[k] - exact.distance_cdf[k]) <= 0.05

    def test_sampled_mode_is_exact_when_all_sources_used(self):
        g = Graph(4, [(0, 1), (2, 3)])
        report = distance_profile(g, sources=4, seed=0)
        assert np.isclose(report.reachable_fraction, 1.0 / 3.0, rtol=1e-12)

    def test_source_validation(self):
        with pytest.raises(ValueError):
            distance_profile(complete_graph(3), sources=0)
