import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import oracle_best_responses, random_utility
from ixcap.errors import CapExceededError, InputError
from ixcap.graphs import cycle_graph, complete_graph, empty_graph, independence_number, sender_graph
from ixcap.utility import (
    Alphabet,
    BlockSequence,
    UtilityMatrix,
    antisymmetric_part,
    block_utility,
    block_utility_rows,
    capped_max,
    capped_min,
    incremented,
    load_utility,
    normalize_diagonal,
    parse_rational,
    product_utility,
    symmetric_part,
    utility_from_graph,
    utility_from_json,
)


class TestParsing:
    def test_rational_forms(self):
        assert parse_rational(3) == 3
        assert parse_rational("3/4") == Fraction(3, 4)
        assert parse_rational("-2.5") == Fraction(-5, 2)
        assert parse_rational(-2.5) == Fraction(-5, 2)
        assert parse_rational(0.1) == Fraction(1, 10)

    def test_rejects_garbage(self):
        with pytest.raises(InputError):
            parse_rational("a/b")
        with pytest.raises(InputError):
            parse_rational(True)
        with pytest.raises(InputError):
            parse_rational(None)

    def test_load_example1(self, tmp_path, example1):
        # entries straight from the worked 3-symbol example
        assert example1.u[1][0] == 1
        assert example1.u[2][0] == -1
        assert example1.u[2][1] == 0
        assert example1.has_zero_diagonal()

    def test_degenerate_single_symbol(self):
        U = utility_from_json({"utility": [[0]]})
        assert U.q == 1
        assert U.u == ((Fraction(0),),)

    def test_nonzero_diagonal_is_normalized(self):
        U = utility_from_json({"utility": [[0, 1, 0], [0, 5, 0], [0, 2, 0]]})
        assert U.u[1][1] == 0
        # column 1 shifted down by 5
        assert U.u[0][1] == -4
        assert U.u[2][1] == -3

    def test_bad_inputs(self, tmp_path):
        with pytest.raises(InputError):
            utility_from_json({"utility": [[0, 1], [0, 0], [1, 1]]})
        with pytest.raises(InputError):
            utility_from_json({"alphabet": ["a"], "utility": [[0, 1], [1, 0]]})
        with pytest.raises(InputError):
            utility_from_json({"utility": []})
        with pytest.raises(InputError):
            utility_from_json([1, 2])
        with pytest.raises(InputError):
            load_utility(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(InputError):
            load_utility(bad)

    def test_decimal_entries_exact(self, example1_prime):
        assert example1_prime.u[0][1] == Fraction(-5, 2)
        assert example1_prime.u[2][0] == Fraction(-3, 2)

    def test_alphabet_validation(self):
        with pytest.raises(InputError):
            Alphabet(())
        with pytest.raises(InputError):
            Alphabet(("a", "a"))
        assert Alphabet(("x", "y")).index_of("y") == 1
        with pytest.raises(InputError):
            Alphabet(("x",)).index_of("z")


class TestNormalization:
    def test_zero_diagonal_unchanged(self, example1):
        again = normalize_diagonal(example1.u, example1.alphabet)
        assert again.u == example1.u

    def test_column_shift(self):
        out = normalize_diagonal([[2, 1], [0, 3]])
        assert out.u == ((Fraction(0), Fraction(-2)), (Fraction(-2), Fraction(0)))

    def test_idempotent(self):
        rng = random.Random(7)
        for _ in range(20):
            q = rng.randint(1, 4)
            raw = [[Fraction(rng.randint(-6, 6), rng.randint(1, 3))
                    for _ in range(q)] for _ in range(q)]
            once = normalize_diagonal(raw)
            twice = normalize_diagonal(once.u, once.alphabet)
            assert once.u == twice.u

    def test_best_responses_preserved(self):
        # normalization must not change which recoveries the sender prefers
        rng = random.Random(11)
        for _ in range(50):
            q = rng.randint(2, 3)
            raw = [[Fraction(rng.randint(-5, 5), rng.randint(1, 4))
                    for _ in range(q)] for _ in range(q)]
            normalized = normalize_diagonal(raw)
            assert oracle_best_responses(raw, q) == \
                oracle_best_responses(normalized.u, q)


class TestBlockUtility:
    def test_paper_two_block(self, example1):
        assert block_utility(example1, (1, 0), (0, 1)) == 0

    def test_truthful_is_zero(self, example1):
        assert block_utility(example1, (2, 1, 0), (2, 1, 0)) == 0

    def test_variant_two_block_negative(self, example1_prime):
        assert block_utility(example1_prime, (1, 0), (0, 1)) == Fraction(-3, 4)

    def test_length_mismatch(self, example1):
        with pytest.raises(InputError):
            block_utility(example1, (0, 1), (0,))

    def test_rows_table_matches_pointwise(self, example1):
        rows = block_utility_rows(example1, 2)
        for x in range(9):
            for y in range(9):
                xs = BlockSequence.from_index(3, 2, x).symbols
                ys = BlockSequence.from_index(3, 2, y).symbols
                assert rows[x][y] == block_utility(example1, xs, ys)


class TestBlockSequence:
    @given(st.integers(2, 5), st.lists(st.integers(0, 4), min_size=1, max_size=6))
    def test_round_trip(self, q, symbols):
        symbols = [s % q for s in symbols]
        seq = BlockSequence.from_symbols(q, symbols)
        back = BlockSequence.from_index(q, seq.n, seq.index)
        assert back.symbols == tuple(symbols)

    def test_msb_first(self):
        assert BlockSequence.from_symbols(3, (1, 0)).index == 3
        assert BlockSequence.from_index(3, 2, 5).symbols == (1, 2)

    def test_bounds(self):
        with pytest.raises(InputError):
            BlockSequence.from_symbols(2, (2,))
        with pytest.raises(InputError):
            BlockSequence.from_index(2, 2, 4)
        with pytest.raises(InputError):
            BlockSequence.from_symbols(2, ())


class TestDecomposition:
    def test_symmetric_input(self):
        U = utility_from_json({"utility": [[0, -1], [-1, 0]]})
        assert symmetric_part(U).u == U.u
        assert all(x == 0 for row in antisymmetric_part(U) for x in row)

    def test_pentagon_paper_values(self, pentagon_literal):
        sym = symmetric_part(pentagon_literal)
        assert sym.u[0][1] == 0
        assert sym.u[0][2] == -1

    def test_reconstructs_exactly(self):
        rng = random.Random(3)
        for _ in range(25):
            U = random_utility(rng, rng.randint(1, 5))
            sym = symmetric_part(U)
            asym = antisymmetric_part(U)
            for i in range(U.q):
                for j in range(U.q):
                    assert sym.u[i][j] + asym[i][j] == U.u[i][j]
                    assert sym.u[i][j] == sym.u[j][i]
                    assert asym[i][j] == -asym[j][i]

    def test_decomposition_unique(self):
        rng = random.Random(5)
        U = random_utility(rng, 4)
        sym = symmetric_part(U)
        assert symmetric_part(sym).u == sym.u
        assert all(x == 0 for row in antisymmetric_part(sym) for x in row)


class TestCappedUtilities:
    def test_sign_classes(self):
        U = utility_from_json(
            {"utility": [[0, 1, -1], [0, 0, -4], [-4, 1, 0]]})
        capped = capped_max(U)
        for i in range(3):
            for j in range(3):
                if i == j:
                    assert capped.u[i][j] == 0
                elif U.u[i][j] >= 0:
                    assert capped.u[i][j] == 1
                else:
                    assert capped.u[i][j] == -1

    def test_two_valued_fixed_point(self):
        U = utility_from_json({"utility": [[0, 1, -1], [-1, 0, 1], [1, -1, 0]]})
        assert capped_max(U).u == U.u
        assert capped_min(U).u == U.u

    def test_example1_extrema(self, example1):
        capped = capped_max(example1)
        offdiag = {capped.u[i][j] for i in range(3) for j in range(3) if i != j}
        assert offdiag == {Fraction(1), Fraction(-1)}

    def test_min_mirrors(self, example1):
        capped = capped_min(example1)
        # nonneg class floor is 0, negative class floor is -2
        assert capped.u[1][0] == 0
        assert capped.u[2][1] == 0
        assert capped.u[2][0] == -2
        assert capped.u[0][2] == -2

    def test_ordering(self):
        rng = random.Random(13)
        for _ in range(30):
            U = random_utility(rng, rng.randint(2, 5))
            hi, lo = capped_max(U), capped_min(U)
            for i in range(U.q):
                for j in range(U.q):
                    assert lo.u[i][j] <= U.u[i][j] <= hi.u[i][j]

    def test_all_negative_class_skip(self):
        U = utility_from_json({"utility": [[0, -3], [-1, 0]]})
        assert capped_max(U).u == ((0, -1), (-1, 0))
        assert capped_min(U).u == ((0, -3), (-3, 0))


class TestIncremented:
    def test_symmetric_unchanged(self):
        U = utility_from_json({"utility": [[0, -2], [-2, 0]]})
        assert incremented(U).u == U.u

    def test_hand_computed_pair(self):
        U = utility_from_json({"utility": [[0, 1], [-4, 0]]})
        inc = incremented(U)
        assert inc.u[0][1] == 1
        assert inc.u[1][0] == 1

    def test_antisymmetric_becomes_absolute(self):
        U = utility_from_json({"utility": [[0, 3, -1], [-3, 0, 2], [1, -2, 0]]})
        inc = incremented(U)
        for i in range(3):
            for j in range(3):
                assert inc.u[i][j] == abs(U.u[i][j])

    def test_symmetric_and_dominating(self):
        rng = random.Random(17)
        for _ in range(25):
            U = random_utility(rng, rng.randint(2, 4))
            inc = incremented(U)
            assert inc.is_symmetric()
            for i in range(U.q):
                for j in range(U.q):
                    assert inc.u[i][j] >= U.u[i][j]


class TestUtilityFromGraph:
    def test_edgeless(self):
        U = utility_from_graph(empty_graph(3))
        assert all(U.u[i][j] == -1 for i in range(3) for j in range(3) if i != j)

    def test_pentagon_zeros_on_edges(self):
        c5 = cycle_graph(5)
        U = utility_from_graph(c5)
        for i in range(5):
            for j in range(5):
                expected = 0 if i == j or c5.has_edge(i, j) else -1
                assert U.u[i][j] == expected
        assert sender_graph(U, 1).rows == c5.rows

    def test_complete_graph_all_zero(self):
        U = utility_from_graph(complete_graph(4))
        assert all(x == 0 for row in U.u for x in row)


class TestProductUtility:
    def test_with_trivial_factor(self, example1):
        one = utility_from_json({"alphabet": ["z"], "utility": [[0]]})
        prod = product_utility(example1, one)
        assert prod.q == 3
        for i in range(3):
            for j in range(3):
                assert prod.u[i][j] == example1.u[i][j] / 2

    def test_example1_squared_alpha(self, example1):
        prod = product_utility(example1, example1)
        assert prod.q == 9
        alpha, _ = independence_number(sender_graph(prod, 1))
        assert alpha >= 4  # product of per-factor independent sets survives

    def test_edgeless_factors(self):
        U = utility_from_graph(empty_graph(2))
        prod = product_utility(U, U)
        assert sender_graph(prod, 1).edge_count() == 0

    def test_cap(self, pentagon):
        with pytest.raises(CapExceededError):
            product_utility(pentagon, pentagon, cap=20)


def test_everything_stays_rational(example1, pentagon):
    for U in (example1, pentagon, capped_max(example1), incremented(example1),
              symmetric_part(pentagon), product_utility(example1, example1)):
        for row in U.u:
            for x in row:
                assert isinstance(x, Fraction)


def test_json_round_trip(pentagon, tmp_path):
    path = tmp_path / "u.json"
    path.write_text(json.dumps(pentagon.to_json_dict()))
    again = load_utility(path)
    assert again.u == pentagon.u
    assert again.alphabet == pentagon.alphabet
