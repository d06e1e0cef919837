import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_problem, two_point_problem
from convexclust import (ClusterProblem, DataMatrix, PenaltyNorm, WeightGraph, dual_objective,
                         duality_gap, primal_objective, split_objective)
from convexclust.model import is_feasible
from convexclust.oracle import dual_reference, objective_reference
from convexclust.prox import project_ball

NORMS = ["l1", "l2", "linf", "group:0,2;1"]


def edges_of(problem):
    g = problem.graph
    return list(zip(g.heads, g.tails, g.weights))


class TestDataMatrix:
    def test_vector_becomes_column(self):
        d = DataMatrix([1.0, 2.0, 3.0])
        assert (d.n, d.p) == (3, 1)
        assert d.grand_mean == pytest.approx([2.0])

    def test_read_only(self):
        d = DataMatrix(np.ones((2, 2)))
        with pytest.raises(ValueError):
            d.values[0, 0] = 5.0

    @pytest.mark.parametrize("bad", [np.empty((0, 2)), [[1.0, np.nan]], [[np.inf]]])
    def test_rejects_bad_values(self, bad):
        with pytest.raises(ValueError):
            DataMatrix(bad)


class TestPenaltyNorm:
    def test_parse_roundtrip(self):
        for text in ["l1", "l2", "linf", "group:0,1;2"]:
            assert str(PenaltyNorm.parse(text)) == text

    @pytest.mark.parametrize("text", ["l3", "group:", "group:0;0", "group:1,2"])
    def test_parse_errors(self, text):
        with pytest.raises(ValueError):
            PenaltyNorm.parse(text)

    def test_dual_pairs(self):
        v = np.array([3.0, -4.0, 1.0])
        assert PenaltyNorm("l1").dual_norm(v) == 4.0
        assert PenaltyNorm("linf").dual_norm(v) == 8.0
        assert PenaltyNorm("l2").dual_norm(v) == pytest.approx(math.sqrt(26))
        g = PenaltyNorm("group", ((0, 1), (2,)))
        assert g.norm(v) == pytest.approx(6.0)
        assert g.dual_norm(v) == pytest.approx(5.0)

    def test_group_dimension_mismatch(self):
        graph = WeightGraph.from_edges(2, [(0, 1, 1.0)])
        with pytest.raises(ValueError):
            ClusterProblem(DataMatrix(np.zeros((2, 2))), graph, "group:0,1,2", 1.0)


class TestObjectives:
    def test_primal_trivial(self, rng):
        prob = random_problem(rng, gamma=0.0)
        assert primal_objective(prob, prob.X) == 0.0
        prob = prob.with_gamma(0.7)
        D = prob.graph.differences(prob.X)
        expected = 0.7 * float(prob.graph.weights @ np.linalg.norm(D, axis=1))
        assert primal_objective(prob, prob.X) == pytest.approx(expected, rel=1e-14)

    def test_two_point_values(self):
        prob = two_point_problem(gamma=0.5)
        U = np.array([[0.5], [1.5]])
        assert primal_objective(prob, U) == pytest.approx(0.75, abs=1e-15)
        assert objective_reference(prob.X, edges_of(prob), "l2", 0.5, U) == pytest.approx(0.75, abs=1e-15)
        assert split_objective(prob, U, np.array([[-1.0]])) == pytest.approx(0.75, abs=1e-15)
        lam = np.array([[-0.5]])
        assert dual_objective(prob, lam) == pytest.approx(-1.25, abs=1e-15)
        assert dual_reference(prob.X, edges_of(prob), "l2", 0.5, lam) == pytest.approx(-1.25, abs=1e-15)
        assert duality_gap(prob, U, lam) == pytest.approx(0.75 - (-1.25), abs=1e-15)

    def test_split_trivial(self, rng):
        prob = random_problem(rng)
        m, p = prob.graph.n_edges, prob.data.p
        assert split_objective(prob, prob.X, np.zeros((m, p))) == 0.0

    def test_dual_trivial(self, rng):
        prob = random_problem(rng, gamma=0.3)
        m, p = prob.graph.n_edges, prob.data.p
        assert dual_objective(prob, np.zeros((m, p))) == 0.0
        lam = np.zeros((m, p))
        lam[0, 0] = 2 * prob.radii[0] + 1.0
        assert dual_objective(prob, lam) == -np.inf
        assert not is_feasible(prob, lam)
        with pytest.raises(ValueError):
            duality_gap(prob, prob.X, lam)

    def test_gap_at_data(self, rng):
        prob = random_problem(rng, gamma=0.3)
        m, p = prob.graph.n_edges, prob.data.p
        assert duality_gap(prob, prob.X, np.zeros((m, p))) == pytest.approx(primal_objective(prob, prob.X))

    def test_dimension_mismatch(self, rng):
        prob = random_problem(rng)
        with pytest.raises(ValueError):
            primal_objective(prob, np.zeros((3, 3)))
        with pytest.raises(ValueError):
            dual_objective(prob, np.zeros((1, 3)))

    @pytest.mark.parametrize("norm", NORMS)
    def test_against_loop_references(self, rng, norm):
        prob = random_problem(rng, n=9, norm=norm, gamma=0.4)
        U = prob.X + 0.3 * rng.standard_normal(prob.X.shape)
        ref = objective_reference(prob.X, edges_of(prob), prob.norm, 0.4, U)
        assert primal_objective(prob, U) == pytest.approx(ref, rel=1e-12)
        lam = project_ball(prob.norm, rng.standard_normal((prob.graph.n_edges, 3)), prob.radii)
        ref = dual_reference(prob.X, edges_of(prob), prob.norm, 0.4, lam)
        assert dual_objective(prob, lam) == pytest.approx(ref, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), norm=st.sampled_from(NORMS), gamma=st.floats(0.0, 3.0))
def test_weak_duality(seed, norm, gamma):
    rng = np.random.default_rng(seed)
    prob = random_problem(rng, n=8, norm=norm, gamma=gamma)
    U = prob.X + rng.standard_normal(prob.X.shape)
    lam = project_ball(prob.norm, 3 * rng.standard_normal((prob.graph.n_edges, 3)), prob.radii)
    assert primal_objective(prob, U) >= dual_objective(prob, lam) - 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), norm=st.sampled_from(NORMS))
def test_permutation_invariance(seed, norm):
    rng = np.random.default_rng(seed)
    prob = random_problem(rng, n=8, norm=norm, gamma=0.6)
    U = prob.X + rng.standard_normal(prob.X.shape)
    perm = rng.permutation(8)
    inv = np.argsort(perm)
    g = prob.graph
    edges = [(min(inv[a], inv[b]), max(inv[a], inv[b]), w) for a, b, w in zip(g.heads, g.tails, g.weights)]
    permuted = ClusterProblem(DataMatrix(prob.X[perm]), WeightGraph.from_edges(8, edges), prob.norm, 0.6)
    assert primal_objective(permuted, U[perm]) == pytest.approx(primal_objective(prob, U), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), norm=st.sampled_from(NORMS))
def test_split_with_exact_differences(seed, norm):
    rng = np.random.default_rng(seed)
    prob = random_problem(rng, n=8, norm=norm, gamma=0.6)
    U = prob.X + rng.standard_normal(prob.X.shape)
    V = prob.graph.differences(U)
    assert abs(split_objective(prob, U, V) - primal_objective(prob, U)) <= 1e-12
