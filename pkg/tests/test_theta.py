import math
import random

import pytest

from conftest import oracle_alpha
from ixcap.errors import ConvergenceError, InputError
from ixcap.graphs import (
    complete_graph,
    cycle_graph,
    empty_graph,
    graph_from_edges,
    path_graph,
)
from ixcap.theta import lovasz_theta


def complete_bipartite(a, b):
    return graph_from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def test_pentagon_is_sqrt5():
    assert lovasz_theta(cycle_graph(5), tol=1e-5) == pytest.approx(
        math.sqrt(5), abs=1e-4)


@pytest.mark.parametrize("q", range(1, 9))
def test_complete_graphs(q):
    assert lovasz_theta(complete_graph(q), tol=1e-5) == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("n", range(2, 9))
def test_paths_match_alpha(n):
    g = path_graph(n)
    alpha, _ = oracle_alpha(g)
    assert lovasz_theta(g, tol=1e-5) == pytest.approx(alpha, abs=1e-5)


@pytest.mark.parametrize("a,b", [(1, 1), (1, 3), (2, 2), (2, 4), (3, 3), (3, 5), (4, 4)])
def test_complete_bipartite_match_alpha(a, b):
    g = complete_bipartite(a, b)
    assert lovasz_theta(g, tol=1e-5) == pytest.approx(max(a, b), abs=1e-5)


def test_edgeless():
    assert lovasz_theta(empty_graph(7), tol=1e-5) == pytest.approx(7.0, abs=1e-6)


def test_theta_at_least_alpha_on_randoms():
    rng = random.Random(113)
    for _ in range(12):
        n = rng.randint(2, 9)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)
                 if rng.random() < 0.5]
        g = graph_from_edges(n, edges)
        alpha, _ = oracle_alpha(g)
        assert lovasz_theta(g, tol=1e-4) >= alpha - 1e-3


def test_petersen():
    petersen = graph_from_edges(10, [
        (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
        (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
        (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
    ])
    assert lovasz_theta(petersen, tol=1e-5) == pytest.approx(4.0, abs=1e-5)


def test_validates_inputs():
    with pytest.raises(InputError):
        lovasz_theta(cycle_graph(5), tol=0.5)
    with pytest.raises(InputError):
        lovasz_theta(cycle_graph(5), tol=0.0)
    with pytest.raises(InputError):
        lovasz_theta(empty_graph(65))


def test_budget_exhaustion_reports_last_iterate():
    with pytest.raises(ConvergenceError) as err:
        lovasz_theta(cycle_graph(7), tol=1e-5, max_iter=5)
    assert err.value.last_value is not None
    assert err.value.residual is not None
