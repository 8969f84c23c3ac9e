import random

import pytest

from conftest import oracle_alpha, oracle_lex_least_mis, oracle_sender_edges, random_utility
from ixcap.channel import identity_channel, make_channel
from ixcap.errors import BudgetExceededError, CapExceededError, InputError
from ixcap.graphs import (
    Graph,
    complete_graph,
    confusability_graph,
    cycle_graph,
    empty_graph,
    graph_from_edges,
    graph_from_json,
    graphs_equal,
    independence_number,
    is_independent,
    path_graph,
    sender_graph,
    strong_power,
    strong_product,
)
from ixcap.utility import Alphabet, utility_from_graph, utility_from_json


def random_graph(rng: random.Random, n: int, p: float = 0.5) -> Graph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return graph_from_edges(n, edges)


class TestSenderGraph:
    def test_example1_is_path(self, example1):
        g = sender_graph(example1, 1)
        assert sorted(g.edges()) == [(0, 1), (1, 2)]

    def test_remark1_blocklength_two(self, example1, example1_prime):
        g = sender_graph(example1, 2)
        gp = sender_graph(example1_prime, 2)
        i01, i10 = 1, 3  # base-3 indices of the sequences 01 and 10
        assert g.has_edge(i01, i10)
        assert not gp.has_edge(i01, i10)

    def test_all_negative_is_edgeless(self):
        U = utility_from_json({"utility": [[0, -1, -1], [-1, 0, -1], [-1, -1, 0]]})
        for n in (1, 2, 3):
            assert sender_graph(U, n).edge_count() == 0

    def test_matches_definition_oracle(self):
        rng = random.Random(23)
        for _ in range(15):
            U = random_utility(rng, rng.randint(2, 3))
            for n in (1, 2):
                g = sender_graph(U, n)
                assert set(g.edges()) == oracle_sender_edges(U, n)

    def test_big_entry_fallback_path(self):
        # entries too large for the vectorized int64 route
        huge = 2**70
        U = utility_from_json({"utility": [[0, huge], [-huge - 1, 0]]})
        g = sender_graph(U, 2)
        assert set(g.edges()) == oracle_sender_edges(U, 2)

    def test_vertex_cap(self, pentagon):
        with pytest.raises(CapExceededError):
            sender_graph(pentagon, 3, cap=100)

    def test_labels(self, example1):
        g = sender_graph(example1, 2)
        assert g.labels[5] == "12"


class TestStrongProducts:
    def test_edgeless_power(self):
        g = empty_graph(3)
        p = strong_power(g, 3)
        assert p.n_vertices == 27
        assert p.edge_count() == 0
        assert independence_number(p)[0] == 27

    def test_c5_square_alpha_five(self):
        p = strong_power(cycle_graph(5), 2)
        assert oracle_alpha(p)[0] == 5
        assert independence_number(p)[0] == 5

    def test_complete_products(self):
        k3 = complete_graph(3)
        assert graphs_equal(strong_product(k3, k3), complete_graph(9))

    def test_power_splits_into_products(self):
        rng = random.Random(29)
        for _ in range(5):
            g = random_graph(rng, 4)
            lhs = strong_power(g, 3)
            rhs = strong_product(strong_power(g, 2), g)
            assert graphs_equal(lhs, rhs)
            rhs2 = strong_product(g, strong_power(g, 2))
            assert graphs_equal(lhs, rhs2)

    def test_power_validates(self):
        with pytest.raises(InputError):
            strong_power(cycle_graph(5), 0)
        with pytest.raises(CapExceededError):
            strong_power(cycle_graph(5), 3, cap=100)

    def test_vertex_ordering_is_row_major(self):
        g1 = path_graph(2)
        g2 = empty_graph(3)
        p = strong_product(g1, g2)
        # (a, b) -> a*3 + b; edges require both coordinates adjacent-or-equal
        assert p.has_edge(0, 3)  # (0,0)-(1,0)
        assert not p.has_edge(0, 4)  # (0,0)-(1,1): second coords differ, no edge


class TestShannonGeneralizationIdentity:
    def test_c5(self):
        c5 = cycle_graph(5)
        U = utility_from_graph(c5)
        for n in (1, 2, 3):
            assert graphs_equal(sender_graph(U, n), strong_power(c5, n))

    def test_random_small_graphs(self):
        rng = random.Random(31)
        for _ in range(8):
            g = random_graph(rng, rng.randint(1, 4))
            U = utility_from_graph(g)
            for n in (1, 2):
                assert graphs_equal(sender_graph(U, n), strong_power(g, n))


class TestIndependenceNumber:
    def test_path_three(self, example1):
        g = sender_graph(example1, 1)
        alpha, witness = independence_number(g)
        assert alpha == 2
        assert witness.vertices == (0, 2)
        assert witness.labels == ("0", "2")

    def test_edgeless_27(self):
        alpha, witness = independence_number(empty_graph(27))
        assert alpha == 27
        assert witness.vertices == tuple(range(27))

    def test_pentagon_square_graphs(self, pentagon, pentagon_literal):
        assert independence_number(sender_graph(pentagon, 2))[0] == 5
        assert independence_number(sender_graph(pentagon_literal, 2))[0] == 4

    def test_matches_oracle_on_randoms(self):
        rng = random.Random(37)
        for _ in range(30):
            g = random_graph(rng, rng.randint(1, 12), rng.uniform(0.2, 0.8))
            alpha, witness = independence_number(g)
            expect_alpha, _ = oracle_alpha(g)
            assert alpha == expect_alpha
            assert is_independent(g, witness.vertices)
            assert witness.vertices == oracle_lex_least_mis(g, alpha)

    def test_witness_canonical_under_relabeling(self):
        # a graph with several maximum independent sets: the 6-cycle
        g = cycle_graph(6)
        alpha, witness = independence_number(g)
        assert alpha == 3
        assert witness.vertices == (0, 2, 4)

    def test_budget_error_carries_best(self):
        rng = random.Random(41)
        g = random_graph(rng, 14, 0.3)
        with pytest.raises(BudgetExceededError) as err:
            independence_number(g, budget=3)
        assert err.value.best is not None

    def test_empty_graph(self):
        alpha, witness = independence_number(Graph(0, ()))
        assert alpha == 0 and witness.vertices == ()


class TestIsIndependent:
    def test_singleton(self, example1):
        g = sender_graph(example1, 1)
        assert is_independent(g, [1])

    def test_path_pair(self, example1):
        g = sender_graph(example1, 1)
        assert is_independent(g, [0, 2])
        assert not is_independent(g, [0, 1])

    def test_out_of_range(self, example1):
        g = sender_graph(example1, 1)
        with pytest.raises(InputError):
            is_independent(g, [0, 7])


class TestConfusabilityGraph:
    def test_identity_edgeless(self):
        ch = identity_channel(Alphabet.of_size(4))
        for n in (1, 2):
            assert confusability_graph(ch, n).edge_count() == 0

    def test_partial_overlap_single_edge(self):
        ch = make_channel(Alphabet.of_size(3),
                          [[1, 0, 0], [0, "1/2", "1/2"], [0, "1/2", "1/2"]])
        g = confusability_graph(ch, 1)
        assert sorted(g.edges()) == [(1, 2)]

    def test_uniform_complete(self):
        ch = make_channel(Alphabet.of_size(3), [["1/3", "1/3", "1/3"]] * 3)
        g = confusability_graph(ch, 1)
        assert graphs_equal(g, complete_graph(3))

    def test_power_equals_direct_definition(self):
        # direct product-support construction as the oracle for small n
        rng = random.Random(43)
        for _ in range(10):
            q = rng.randint(2, 3)
            rows = []
            for _ in range(q):
                support = [rng.randint(0, 1) for _ in range(q)]
                if not any(support):
                    support[rng.randrange(q)] = 1
                total = sum(support)
                rows.append([f"{s}/{total}" for s in support])
            ch = make_channel(Alphabet.of_size(q), rows)
            g2 = confusability_graph(ch, 2)
            # oracle: inputs adjacent iff all letter supports intersect
            for a in range(q**2):
                for b in range(a + 1, q**2):
                    ya, yb = divmod(a, q), divmod(b, q)
                    shares = all(
                        ch.support[sa] & ch.support[sb]
                        or sa == sb
                        for sa, sb in zip(ya, yb)
                    )
                    # strong-power semantics: equal letters allowed, but at
                    # least the pair must differ somewhere (a != b)
                    direct = all(
                        ch.support[sa] & ch.support[sb] for sa, sb in zip(ya, yb)
                    )
                    assert g2.has_edge(a, b) == direct == shares

    def test_float_zero_is_exact(self):
        ch = make_channel(Alphabet.of_size(2), [[1, 0.0], [0.0, 1]])
        assert ch.support == (1, 2)
        assert confusability_graph(ch, 1).edge_count() == 0


class TestGraphsEqual:
    def test_self(self):
        g = cycle_graph(5)
        assert graphs_equal(g, g)

    def test_size_mismatch_false(self):
        assert not graphs_equal(path_graph(3), complete_graph(3))
        assert not graphs_equal(path_graph(3), path_graph(4))


class TestGraphJson:
    def test_round_trip(self):
        g = graph_from_json({"n": 5, "edges": [[0, 1], [1, 2], [2, 3], [3, 4], [4, 0]]})
        assert graphs_equal(g, cycle_graph(5))

    def test_rejects_bad_edges(self):
        with pytest.raises(InputError):
            graph_from_json({"n": 3, "edges": [[0, 3]]})
        with pytest.raises(InputError):
            graph_from_json({"n": 3, "edges": [[1, 1]]})
        with pytest.raises(InputError):
            graph_from_json({"edges": []})


class TestSupermultiplicativity:
    def test_sender_alpha_supermultiplicative(self):
        rng = random.Random(47)
        utilities = [random_utility(rng, 3) for _ in range(4)]
        for U in utilities:
            alphas = {
                n: independence_number(sender_graph(U, n))[0] for n in (1, 2, 3, 4)
            }
            for m in (1, 2):
                for n in (1, 2):
                    if m + n <= 4:
                        assert alphas[m + n] >= alphas[m] * alphas[n]

    def test_subgraph_monotonicity(self):
        rng = random.Random(53)
        for _ in range(10):
            n = rng.randint(2, 9)
            g2 = random_graph(rng, n, 0.6)
            # remove some edges to get a subgraph
            kept = [e for e in g2.edges() if rng.random() < 0.5]
            g1 = graph_from_edges(n, kept)
            assert independence_number(g1)[0] >= independence_number(g2)[0]
