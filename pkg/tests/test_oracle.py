import numpy as np
import pytest

from conftest import random_problem, two_point_problem
from convexclust import AmaConfig, ClusterProblem, DataMatrix, WeightGraph, primal_objective, solve_ama
from convexclust.oracle import (OracleReport, dense_laplacian_spectrum, prox_reference,
                                subgradient_reference, two_point_closed_form)


def test_closed_form_examples():
    u1, u2 = two_point_closed_form([0.0], [2.0], 1.0, 0.0)
    assert (u1[0], u2[0]) == (0.0, 2.0)
    u1, u2 = two_point_closed_form([0.0, 1.0], [2.0, 3.0], 1.0, 5.0)
    np.testing.assert_array_equal(u1, [1.0, 2.0])
    np.testing.assert_array_equal(u2, [1.0, 2.0])
    u1, u2 = two_point_closed_form([0.0], [2.0], 1.0, 0.25)
    np.testing.assert_allclose([u1[0], u2[0]], [0.25, 1.75], atol=1e-15)


def test_subgradient_matches_closed_form():
    prob = two_point_problem(gamma=0.25)
    U = subgradient_reference(prob)
    np.testing.assert_allclose(U.ravel(), [0.25, 1.75], atol=1e-3)
    rng = np.random.default_rng(7)
    for _ in range(5):
        x1, x2 = rng.standard_normal(2), rng.standard_normal(2)
        w, gamma = rng.uniform(0.5, 1.5), rng.uniform(0.0, 1.0)
        prob = ClusterProblem(DataMatrix(np.array([x1, x2])), WeightGraph.from_edges(2, [(0, 1, w)]), "l2", gamma)
        np.testing.assert_allclose(subgradient_reference(prob), np.array(two_point_closed_form(x1, x2, w, gamma)),
                                   atol=1e-3)


def test_subgradient_gamma_zero(rng):
    prob = random_problem(rng, n=6, gamma=0.0)
    np.testing.assert_array_equal(subgradient_reference(prob, iterations=10), prob.X)


@pytest.mark.parametrize("norm", ["l1", "l2", "linf", "group:0;1,2"])
def test_subgradient_matches_ama(norm):
    prob = random_problem(np.random.default_rng(3), n=4, norm=norm, gamma=0.3)
    f_sub = primal_objective(prob, subgradient_reference(prob))
    f_ama = primal_objective(prob, solve_ama(prob, AmaConfig(tol=1e-10)).centroids)
    assert f_sub == pytest.approx(f_ama, rel=1e-3)


def test_prox_reference_examples():
    for norm in ("l1", "l2", "linf"):
        np.testing.assert_array_equal(prox_reference(norm, [1.0, -2.0], 0.0), [1.0, -2.0])
    np.testing.assert_allclose(prox_reference("l2", [3.0, 4.0], 2.5), [1.5, 2.0], atol=1e-6)
    np.testing.assert_allclose(prox_reference("linf", [3.0, 1.0], 2.0), [1.0, 1.0], atol=1e-6)


def test_spectrum():
    g = WeightGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])
    np.testing.assert_allclose(dense_laplacian_spectrum(g), [0.0, 1.0, 3.0], atol=1e-12)
    with pytest.raises(ValueError):
        dense_laplacian_spectrum(WeightGraph(51, [], [], []))


def test_report(tmp_path):
    rep = OracleReport()
    rep.add("a", [1.0, 2.0], [1.0, 2.5], seed=1)
    rep.add("b", 4.0, 4.0)
    assert rep.max_abs_error() == 0.5
    out = tmp_path / "r.csv"
    rep.write_csv(out)
    lines = out.read_text().splitlines()
    assert lines[0] == "description,seed,abs_error,rel_error" and len(lines) == 3


@pytest.mark.slow
@pytest.mark.parametrize("norm", ["l1", "l2", "linf", "group"])
def test_subgradient_agrees_on_50_instances(norm):
    rng = np.random.default_rng(["l1", "l2", "linf", "group"].index(norm) + 40)
    worst = 0.0
    for _ in range(50):
        n, p = int(rng.integers(2, 7)), int(rng.integers(1, 4))
        spec = "group:0;" + ",".join(map(str, range(1, p))) if norm == "group" and p > 1 else norm
        if spec == "group":
            spec = "group:0"
        prob = random_problem(rng, n=n, p=p, k=int(rng.integers(1, n)), norm=spec,
                              gamma=float(10 ** rng.uniform(-2, 0)))
        f_sub = primal_objective(prob, subgradient_reference(prob))
        f_ama = primal_objective(prob, solve_ama(prob, AmaConfig(tol=1e-11, accelerated=True)).centroids)
        worst = max(worst, abs(f_sub - f_ama) / abs(f_ama))
    assert worst <= 1e-3
