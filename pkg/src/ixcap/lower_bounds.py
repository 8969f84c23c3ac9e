"""Lower-bound certificates: the permutation-feasibility problem over symbol
subsets, its blocklength generalization, the transport test, and the quick
sufficient conditions.

Feasibility of a subset means every closed chain of distinct members has
strictly negative total utility.  Ties matter: a zero-weight chain already
destroys feasibility, so cycle detection looks for nonpositive cycles, not
just negative ones.  All arithmetic is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable, Sequence

import networkx as nx

from .errors import BudgetExceededError, CapExceededError, InputError
from .graphs import Graph, independence_number, sender_graph
from .utility import (
    UtilityMatrix,
    block_utility_rows,
    parse_rational,
    sign_class_extrema,
    symmetric_part,
)

#: permutation brute force is exponential; larger subsets must use cycles
BRUTE_FORCE_SUBSET_CAP = 9
#: default number of candidate subsets examined before giving up
DEFAULT_SUBSET_BUDGET = 500_000
#: largest q**n for which the blocklength search is exhaustive by default
EXACT_SEQUENCE_SEARCH_CAP = 32

METHOD_CYCLE = "cycle-detection"
METHOD_BRUTE = "permutation-brute-force"


@dataclass(frozen=True)
class FeasibleSetCertificate:
    """A subset certified feasible, carrying the bound |subset|^(1/n)."""

    subset: tuple[int, ...]
    labels: tuple[str, ...]
    blocklength: int
    method: str
    size: int
    optimal: bool

    @property
    def bound_root(self) -> tuple[int, int]:
        """The bound as an exact (base, root) pair: base**(1/root)."""
        return (self.size, self.blocklength)

    @property
    def bound_float(self) -> float:
        return self.size ** (1.0 / self.blocklength)

    def to_json_dict(self) -> dict:
        return {
            "subset": list(self.labels),
            "blocklength": self.blocklength,
            "method": self.method,
            "size": self.size,
            "bound": {
                "base": self.size,
                "root": self.blocklength,
                "value": self.bound_float,
            },
            "optimal": self.optimal,
        }


def _validate_subset(q: int, subset: Sequence[int]) -> tuple[int, ...]:
    subset = tuple(subset)
    if len(set(subset)) != len(subset):
        raise InputError(f"subset has repeated symbols: {subset}")
    for s in subset:
        if not 0 <= s < q:
            raise InputError(f"symbol index {s} out of range for q={q}")
    return subset


def has_positive_edges_cycle(U: UtilityMatrix, subset: Sequence[int]
                             ) -> tuple[bool, tuple[int, ...] | None]:
    """Detect a cyclic arrangement along which every misreport is weakly
    profitable.

    Searches for a directed cycle in the graph with an arc j -> i whenever
    u(i, j) >= 0.  Returns (True, chain) with the chain rotated so its
    smallest symbol comes first, or (False, None).
    """
    subset = _validate_subset(U.q, subset)
    if len(subset) < 2:
        raise InputError("a cycle needs at least two symbols")
    return _nonneg_arc_cycle(lambda i, j: U.u[i][j] >= 0, subset)


def _nonneg_arc_cycle(arc: Callable[[int, int], bool], subset: tuple[int, ...]
                      ) -> tuple[bool, tuple[int, ...] | None]:
    # iterative DFS with colors over arcs j -> i (observe j, recover i)
    succ = {
        j: [i for i in subset if i != j and arc(i, j)] for j in subset
    }
    color = {v: 0 for v in subset}  # 0 unvisited, 1 on stack, 2 done
    parent: dict[int, int] = {}
    for root in subset:
        if color[root]:
            continue
        stack = [(root, iter(succ[root]))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if color[w] == 0:
                    color[w] = 1
                    parent[w] = v
                    stack.append((w, iter(succ[w])))
                    advanced = True
                    break
                if color[w] == 1:
                    cycle = [v]
                    x = v
                    while x != w:
                        x = parent[x]
                        cycle.append(x)
                    cycle.reverse()
                    return True, _rotate_min_first(tuple(cycle))
            if not advanced:
                color[v] = 2
                stack.pop()
    return False, None


def _rotate_min_first(cycle: tuple[int, ...]) -> tuple[int, ...]:
    k = cycle.index(min(cycle))
    return cycle[k:] + cycle[:k]


def _has_nonneg_chain_bf(u, subset: tuple[int, ...]) -> bool:
    """Quick verdict: does some closed chain of distinct members sum to >= 0?

    Bellman-Ford on the negated weights w(a -> b) = -u[b][a] from a virtual
    super-source with |subset| relaxation rounds detects strictly positive
    chains; chains summing to exactly zero show up as cycles in the
    zero-reduced-weight subgraph afterwards.
    """
    k = len(subset)
    if k < 2:
        return False
    w = [[-u[subset[b]][subset[a]] for b in range(k)] for a in range(k)]
    dist = [Fraction(0)] * k
    for _ in range(k):
        changed = False
        for a in range(k):
            da = dist[a]
            row = w[a]
            for b in range(k):
                if b != a and da + row[b] < dist[b]:
                    dist[b] = da + row[b]
                    changed = True
        if not changed:
            break
    if changed:
        return True
    zero_succ = [
        [b for b in range(k) if b != a and dist[a] + w[a][b] == dist[b]]
        for a in range(k)
    ]
    found, _ = _nonneg_arc_cycle(lambda i, j: i in zero_succ[j], tuple(range(k)))
    return found


def _nonneg_chain_witness(u, subset: tuple[int, ...]) -> tuple[int, ...] | None:
    """A closed chain of distinct subset members with utility sum >= 0, or None.

    Exact max-plus dynamic program over walk lengths: D_m[a][b] is the
    heaviest m-arc walk a -> b with arc weight u[b][a] ("report a as b").
    A closed walk of weight >= 0 exists iff a simple such cycle does, and the
    witness walk is reduced to a simple cycle by splicing out negative loops.
    """
    k = len(subset)
    if k < 2:
        return None
    c = [[None if a == b else u[subset[b]][subset[a]] for b in range(k)]
         for a in range(k)]
    layers = [None, c]  # layers[m][a][b], m arcs
    hit = None
    for m in range(2, k + 1):
        prev = layers[-1]
        cur = [[None] * k for _ in range(k)]
        for a in range(k):
            for b in range(k):
                best = None
                for mid in range(k):
                    if prev[a][mid] is None or c[mid][b] is None:
                        continue
                    cand = prev[a][mid] + c[mid][b]
                    if best is None or cand > best:
                        best = cand
                cur[a][b] = best
        layers.append(cur)
        for v in range(k):
            if cur[v][v] is not None and cur[v][v] >= 0:
                hit = (m, v)
                break
        if hit:
            break
    if hit is None:
        return None

    m, v = hit
    # backtrack the argmax walk v -> v of length m, tail first
    walk = [v]
    target, length = v, m
    while length > 1:
        value = layers[length][v][target]
        for mid in range(k):
            left = layers[length - 1][v][mid]
            if left is not None and c[mid][target] is not None \
                    and left + c[mid][target] == value:
                walk.append(mid)
                target, length = mid, length - 1
                break
        else:
            raise AssertionError("max-plus backtrack failed")
    walk.append(v)
    walk.reverse()  # walk[0] == v, ..., walk[-1] == v, arcs walk[i] -> walk[i+1]

    def weight(seq):
        return sum(
            (c[seq[i]][seq[i + 1]] for i in range(len(seq) - 1)), Fraction(0)
        )

    # splice out strictly negative inner loops until the cycle is simple
    while True:
        seen = {}
        dup = None
        for idx, node in enumerate(walk[:-1]):
            if node in seen:
                dup = (seen[node], idx)
                break
            seen[node] = idx
        if dup is None:
            break
        i, j = dup
        inner = walk[i:j + 1]
        if weight(inner) >= 0:
            walk = inner
        else:
            walk = walk[:i + 1] + walk[j + 1:]
    assert weight(walk) >= 0
    chain = tuple(subset[x] for x in walk[:-1])
    return _rotate_min_first(chain)


def _worst_permutation(u, subset: tuple[int, ...]
                       ) -> tuple[Fraction, tuple[int, ...]]:
    """Maximum of sum_j u(pi(j), j) over non-identity permutations of subset."""
    k = len(subset)
    best_val = None
    best_perm = None
    idx = tuple(range(k))
    for p in permutations(idx):
        if p == idx:
            continue
        val = sum((u[subset[p[m]]][subset[m]] for m in range(k)), Fraction(0))
        if best_val is None or val > best_val:
            best_val, best_perm = val, p
    return best_val, tuple(subset[m] for m in best_perm)


def _feasible(u, subset: tuple[int, ...], method: str) -> tuple[bool, dict | None]:
    """Feasibility verdict with an infeasibility witness when negative."""
    if len(subset) <= 1:
        return True, None
    if method == METHOD_CYCLE:
        if not _has_nonneg_chain_bf(u, subset):
            return True, None
        chain = _nonneg_chain_witness(u, subset)
        assert chain is not None, "verdict and witness search disagree"
        return False, {"kind": "chain", "chain": chain}
    if method == METHOD_BRUTE:
        if len(subset) > BRUTE_FORCE_SUBSET_CAP:
            raise CapExceededError(
                f"permutation brute force is capped at {BRUTE_FORCE_SUBSET_CAP} "
                f"symbols, got {len(subset)}"
            )
        worst, perm = _worst_permutation(u, subset)
        if worst < 0:
            return True, None
        return False, {"kind": "permutation", "value": worst, "images": perm}
    raise InputError(f"unknown feasibility method {method!r}")


def is_feasible_O(U: UtilityMatrix, subset: Sequence[int],
                  method: str = METHOD_CYCLE) -> bool:
    """Whether every non-identity permutation of subset has negative total
    utility (equivalently, every closed chain is strictly negative)."""
    subset = _validate_subset(U.q, subset)
    if not subset:
        raise InputError("subset must be nonempty")
    ok, _ = _feasible(U.u, subset, method)
    return ok


def feasibility_report(U: UtilityMatrix, subset: Sequence[int],
                       method: str = METHOD_CYCLE) -> dict:
    """Verdict plus a serializable witness for infeasibility proofs."""
    subset = _validate_subset(U.q, subset)
    ok, witness = _feasible(U.u, subset, method)
    report = {
        "subset": [U.alphabet.symbols[s] for s in subset],
        "method": method,
        "feasible": ok,
    }
    if witness is not None:
        if witness["kind"] == "chain":
            report["witness_chain"] = [U.alphabet.symbols[s] for s in witness["chain"]]
        else:
            report["witness_permutation"] = {
                U.alphabet.symbols[subset[m]]: U.alphabet.symbols[witness["images"][m]]
                for m in range(len(subset))
            }
            report["witness_value"] = str(witness["value"])
    return report


def _independent_subsets(graph: Graph, size: int):
    """All independent vertex subsets of the given size, in lex order."""
    n = graph.n_vertices
    chosen: list[int] = []

    def rec(start: int, excl: int):
        if len(chosen) == size:
            yield tuple(chosen)
            return
        # not enough vertices left to finish
        for v in range(start, n - (size - len(chosen)) + 1):
            if (excl >> v) & 1:
                continue
            chosen.append(v)
            yield from rec(v + 1, excl | graph.rows[v])
            chosen.pop()

    yield from rec(0, 0)


class _SubsetSearch:
    """Largest feasible subset, searched by decreasing size over independent
    sets of the symmetric-part graph, with infeasible-core memoization."""

    def __init__(self, u, sym_graph: Graph, method: str, budget: int):
        self.u = u
        self.sym_graph = sym_graph
        self.method = method
        self.budget = budget
        self.examined = 0
        self.infeasible_cores: list[frozenset[int]] = []

    def _pruned(self, subset: tuple[int, ...]) -> bool:
        s = frozenset(subset)
        return any(core <= s for core in self.infeasible_cores)

    def run(self) -> tuple[tuple[int, ...] | None, bool]:
        """Returns (best subset or None, search-was-exhaustive)."""
        alpha_sym, witness = independence_number(self.sym_graph)
        for size in range(alpha_sym, 0, -1):
            for subset in _independent_subsets(self.sym_graph, size):
                self.examined += 1
                if self.examined > self.budget:
                    return None, False
                if self._pruned(subset):
                    continue
                ok, wit = _feasible(self.u, subset, self.method)
                if ok:
                    return subset, True
                if wit is not None and wit["kind"] == "chain":
                    self.infeasible_cores.append(frozenset(wit["chain"]))
        return None, True  # unreachable: singletons are always feasible


def gamma(U: UtilityMatrix, method: str = METHOD_CYCLE,
          budget: int = DEFAULT_SUBSET_BUDGET) -> tuple[int, FeasibleSetCertificate]:
    """Size of the largest feasible symbol subset, with a canonical witness.

    Every feasible subset is independent in the symmetric-part graph, which
    prunes the search space; the lexicographically least optimal subset is
    returned.
    """
    sym_graph = sender_graph(symmetric_part(U), 1)
    search = _SubsetSearch(U.u, sym_graph, method, budget)
    subset, exhaustive = search.run()
    if not exhaustive:
        raise BudgetExceededError(
            f"subset search exceeded budget of {budget} candidates",
            best=None,
        )
    cert = FeasibleSetCertificate(
        subset=subset,
        labels=tuple(U.alphabet.symbols[s] for s in subset),
        blocklength=1,
        method=method,
        size=len(subset),
        optimal=True,
    )
    return len(subset), cert




def gamma_n(U: UtilityMatrix, n: int, method: str = METHOD_CYCLE,
            budget: int = DEFAULT_SUBSET_BUDGET
            ) -> tuple[int, FeasibleSetCertificate]:
    """Largest subset of X^n feasible for the blocklength-n problem.

    Exhaustive (provably optimal) when q**n is small; otherwise tries the
    canonical maximum independent sets of the symmetric graph first and falls
    back to a budgeted search whose result is flagged optimal=False.
    """
    if n < 1:
        raise InputError("blocklength must be at least 1")
    q = U.q
    nv = q**n
    u_rows = block_utility_rows(U, n)
    sym_graph = sender_graph(symmetric_part(U), n)
    labels = sym_graph.labels

    if nv <= EXACT_SEQUENCE_SEARCH_CAP:
        search = _SubsetSearch(u_rows, sym_graph, method, budget)
        subset, exhaustive = search.run()
        if exhaustive:
            cert = FeasibleSetCertificate(
                subset=subset,
                labels=tuple(labels[s] for s in subset),
                blocklength=n,
                method=method,
                size=len(subset),
                optimal=True,
            )
            return len(subset), cert

    # large space: a feasible maximum independent set of the symmetric graph
    # matches the alpha upper bound exactly, which still proves optimality
    alpha_sym, witness = independence_number(sym_graph)
    ok, _ = _feasible(u_rows, witness.vertices, method)
    if ok:
        cert = FeasibleSetCertificate(
            subset=witness.vertices,
            labels=tuple(labels[s] for s in witness.vertices),
            blocklength=n,
            method=method,
            size=alpha_sym,
            optimal=True,
        )
        return alpha_sym, cert

    # anytime floor: an independent set of the sender graph itself is always
    # feasible (every chain step is already strictly negative)
    base = sender_graph(U, n)
    _, base_wit = independence_number(base)
    best = base_wit.vertices
    search = _SubsetSearch(u_rows, sym_graph, method, budget)
    subset, exhaustive = search.run()
    if subset is not None and len(subset) > len(best):
        best = subset
    optimal = exhaustive or len(best) == alpha_sym
    cert = FeasibleSetCertificate(
        subset=best,
        labels=tuple(labels[s] for s in best),
        blocklength=n,
        method=method,
        size=len(best),
        optimal=optimal,
    )
    return len(best), cert


def sufficient_margin_check(U: UtilityMatrix, subset: Sequence[int]) -> bool:
    """Margin condition: no positive-edges cycle and the smallest penalty
    outweighs (|subset|-1) times the largest gain.  True implies feasibility;
    the converse fails in general."""
    subset = _validate_subset(U.q, subset)
    if len(subset) < 2:
        return True
    cycle, _ = _nonneg_arc_cycle(lambda i, j: U.u[i][j] >= 0, subset)
    if cycle:
        return False
    negs = []
    nonnegs = []
    for i in subset:
        for j in subset:
            if i == j:
                continue
            x = U.u[i][j]
            (nonnegs if x >= 0 else negs).append(x)
    if not nonnegs:
        # no weakly profitable misreport at all: the subset is independent in
        # the base sender graph and trivially feasible
        return True
    return min(-x for x in negs) > (len(subset) - 1) * max(nonnegs)


def beta_cycle_bound(U: UtilityMatrix, subset: Sequence[int]) -> bool:
    """Per-chain arc-count condition derived from the capped utility.

    With beta = max-gain / |max-penalty|, every cyclic arrangement of distinct
    subset symbols must contain a negative arc and strictly fewer than 1/beta
    nonnegative arcs.  True implies the subset is feasible.
    """
    subset = _validate_subset(U.q, subset)
    max_nonneg, max_neg, _, _ = sign_class_extrema(U)
    if max_neg is None:
        raise InputError("utility has no negative entries; beta is undefined")
    beta = (max_nonneg if max_nonneg is not None else Fraction(0)) / (-max_neg)
    if len(subset) > BRUTE_FORCE_SUBSET_CAP:
        raise CapExceededError(
            f"cycle enumeration capped at {BRUTE_FORCE_SUBSET_CAP} symbols"
        )
    for k in range(2, len(subset) + 1):
        for combo in combinations(subset, k):
            first, rest = combo[0], combo[1:]
            for tail in permutations(rest):
                cycle = (first,) + tail
                arcs = [
                    (cycle[m], cycle[(m + 1) % k]) for m in range(k)
                ]
                nonneg = sum(1 for j, i in arcs if U.u[i][j] >= 0)
                neg = k - nonneg
                if neg == 0 or nonneg * beta >= 1:
                    return False
    return True


def type_class_size(set_size: int, K: int) -> int:
    """Number of sequences of length K*set_size in which each of the set's
    symbols appears exactly K times: (K*s)! / (K!)**s, exactly."""
    if set_size < 1 or K < 1:
        raise InputError("set_size and K must be at least 1")
    return math.factorial(K * set_size) // math.factorial(K) ** set_size


@dataclass(frozen=True)
class TransportResult:
    """Outcome of the equal-marginals transport relaxation."""

    marginal: tuple[Fraction, ...]
    optimum: Fraction
    unique_diagonal: bool
    entropy_bound: float | None

    def to_json_dict(self) -> dict:
        return {
            "marginal": [str(p) for p in self.marginal],
            "optimum": str(self.optimum),
            "unique_diagonal": self.unique_diagonal,
            "entropy_bound": self.entropy_bound,
        }


def transport_lower_bound(U: UtilityMatrix, P: Sequence) -> TransportResult:
    """Maximize the expected utility over couplings with both marginals P.

    Solved exactly as an integer min-cost flow after clearing denominators.
    The diagonal coupling always achieves 0; when it is the unique optimum
    the support of P certifies exp(H(P)) as a capacity lower bound (q-ary
    entropy, exponential base q, which is base-independent).
    """
    q = U.q
    marginal = tuple(parse_rational(p) for p in P)
    if len(marginal) != q:
        raise InputError(f"marginal must have {q} entries, got {len(marginal)}")
    if any(p < 0 for p in marginal):
        raise InputError("marginal has a negative entry")
    if sum(marginal) != 1:
        raise InputError(f"marginal sums to {sum(marginal)}, expected 1")

    denom = 1
    for p in marginal:
        denom = denom * p.denominator // math.gcd(denom, p.denominator)
    supplies = [int(p * denom) for p in marginal]
    scale, uint = U.scaled_integer_entries()

    g = nx.DiGraph()
    for i in range(q):
        g.add_node(("x", i), demand=-supplies[i])
        g.add_node(("y", i), demand=supplies[i])
    for i in range(q):
        for j in range(q):
            # coupling mass W(i, j) carries utility u(i, j); costs negated
            g.add_edge(("x", i), ("y", j), weight=-uint[i][j])
    cost, _flow = nx.network_simplex(g)
    optimum = Fraction(-cost, denom * scale)

    support = tuple(i for i in range(q) if marginal[i] > 0)
    unique = False
    if optimum == 0:
        # diagonal is optimal; it is unique iff no nonpositive chain lives in
        # the support (any alternative optimum decomposes into such chains)
        unique = _feasible(U.u, support, METHOD_CYCLE)[0]
    bound = None
    if unique:
        bound = math.exp(-sum(float(p) * math.log(float(p))
                              for p in marginal if p > 0))
    return TransportResult(marginal, optimum, unique, bound)
