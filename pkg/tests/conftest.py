import numpy as np
import pytest

from convexclust import ClusterProblem, DataMatrix, WeightGraph, build_knn_gaussian_weights


def two_point_problem(gamma=0.5, w=1.0, x=((0.0,), (2.0,)), norm="l2"):
    graph = WeightGraph.from_edges(2, [(0, 1, w)])
    return ClusterProblem(DataMatrix(np.array(x, dtype=float)), graph, norm, gamma)


def random_problem(rng, n=12, p=3, k=3, norm="l2", gamma=0.1, phi=0.5):
    X = rng.standard_normal((n, p))
    data = DataMatrix(X)
    graph = build_knn_gaussian_weights(data, min(k, n - 1), phi, warn=False)
    return ClusterProblem(data, graph, norm, gamma)


def random_graph(rng, n, density=0.4):
    edges = [(i, j, float(rng.uniform(0.1, 2.0)))
             for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    return WeightGraph.from_edges(n, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(module.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
