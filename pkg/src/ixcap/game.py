"""Receiver strategies, sender best responses, and equilibrium verification
for the noiseless and noisy channels.

The pessimistic worst case over best responses never enumerates the
exponential response set: block utilities are separable per source sequence,
so a sequence survives every best response exactly when decoding it
truthfully is the sender's unique argmax among the strategy's image.  A tie
is adversarial and destroys the guarantee.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from pathlib import Path

from .channel import Channel
from .errors import InputError
from .graphs import (
    DEFAULT_NODE_BUDGET,
    IndependentSetWitness,
    confusability_graph,
    independence_number,
    is_independent,
    sender_graph,
)
from .lower_bounds import gamma
from .theta import lovasz_theta
from .upper_bounds import CapacityBracket, ExactValue, xi_bracket
from .utility import (
    BlockSequence,
    UtilityMatrix,
    block_utility,
    block_utility_rows,
    sequence_label,
)


class _Dominated:
    """Sentinel for an expected utility forced to the error outcome.

    The error symbol is never preferred by the sender, so any input whose
    possible outputs include an undecoded one is strictly dominated; no
    extended-real arithmetic is ever performed."""

    __slots__ = ()

    def __repr__(self):
        return "DOMINATED"


DOMINATED = _Dominated()


@dataclass(frozen=True)
class ReceiverStrategy:
    """Decoding map on output sequences; None decodes to the error symbol."""

    n: int
    decode: tuple[int | None, ...]

    def image(self) -> tuple[int, ...]:
        return tuple(sorted({t for t in self.decode if t is not None}))

    def decoded_count(self) -> int:
        return sum(1 for t in self.decode if t is not None)


@dataclass(frozen=True)
class SenderStrategy:
    """Encoding map on source sequences (total function)."""

    n: int
    encode: tuple[int, ...]


@dataclass(frozen=True)
class GameOutcome:
    decoded_worst: tuple[int, ...]
    decoded_size: int
    rate: float
    best_response_summary: tuple[tuple[int, ...], ...]


def naive_receiver_strategy(q: int, n: int) -> ReceiverStrategy:
    """Blind identity decoding of every output sequence."""
    return ReceiverStrategy(n, tuple(range(q**n)))


def receiver_strategy_from_set(U: UtilityMatrix, vertices, n: int,
                               ) -> ReceiverStrategy:
    """Identity on the given independent set, error symbol elsewhere."""
    if isinstance(vertices, IndependentSetWitness):
        vertices = vertices.vertices
    vs = sorted(set(vertices))
    nv = U.q**n
    for v in vs:
        if not 0 <= v < nv:
            raise InputError(f"sequence index {v} out of range for n={n}")
    g = sender_graph(U, n)
    if not is_independent(g, vs):
        raise InputError("the set is not independent in the sender graph")
    decode = [None] * nv
    for v in vs:
        decode[v] = v
    return ReceiverStrategy(n, tuple(decode))


def worst_case_decoded_set(U: UtilityMatrix, g: ReceiverStrategy) -> GameOutcome:
    """Sequences recovered under *every* best response to the strategy.

    A source sequence x survives iff x is in the image and every other image
    element has strictly negative block utility against x; zero-utility
    alternatives are adversarial ties and disqualify x.
    """
    n = g.n
    nv = U.q**n
    if len(g.decode) != nv:
        raise InputError(f"strategy table has {len(g.decode)} entries, expected {nv}")
    ub = block_utility_rows(U, n)
    image = g.image()
    decoded = []
    summary = []
    for x in range(nv):
        if not image:
            summary.append(())
            continue
        best = max(ub[t][x] for t in image)
        argmax = tuple(t for t in image if ub[t][x] == best)
        summary.append(argmax)
        if x in image and argmax == (x,):
            decoded.append(x)
    size = len(decoded)
    return GameOutcome(
        decoded_worst=tuple(decoded),
        decoded_size=size,
        rate=size ** (1.0 / n),
        best_response_summary=tuple(summary),
    )


def equilibrium_value_noiseless(U: UtilityMatrix, n: int,
                                budget: int = DEFAULT_NODE_BUDGET
                                ) -> tuple[int, ReceiverStrategy]:
    """Worst-case optimal decoded count and a strategy achieving it.

    The count is the independence number of the blocklength-n sender graph;
    the canonical witness set is decoded identically and everything else maps
    to the error symbol.  The construction is re-verified via the worst-case
    best-response analysis before returning.
    """
    g = sender_graph(U, n)
    alpha, witness = independence_number(g, budget=budget)
    strategy = receiver_strategy_from_set(U, witness.vertices, n)
    outcome = worst_case_decoded_set(U, strategy)
    if outcome.decoded_size != alpha or set(outcome.decoded_worst) != set(witness.vertices):
        raise AssertionError("equilibrium verification failed")
    return alpha, strategy


def _product_support(channel: Channel, y_symbols) -> list[tuple[int, ...]]:
    per_letter = [channel.support_set(sym) for sym in y_symbols]
    return list(iter_product(*per_letter))


def _sequence_index(q: int, symbols) -> int:
    idx = 0
    for s in symbols:
        idx = idx * q + s
    return idx


def output_support_indices(channel: Channel, y_index: int, n: int) -> frozenset[int]:
    """Indices of output sequences reachable from input sequence y."""
    q = channel.q
    y = BlockSequence.from_index(q, n, y_index).symbols
    return frozenset(_sequence_index(q, z) for z in _product_support(channel, y))


def expected_block_utility(U: UtilityMatrix, channel: Channel,
                           g: ReceiverStrategy, y_index: int, x_index: int,
                           n: int):
    """Exact expected utility of sending y when the source is x, under the
    memoryless product channel; DOMINATED when some possible output decodes
    to the error symbol."""
    q = U.q
    if U.alphabet.q != channel.alphabet.q:
        raise InputError("utility and channel alphabets differ in size")
    y = BlockSequence.from_index(q, n, y_index).symbols
    x = BlockSequence.from_index(q, n, x_index).symbols
    total = Fraction(0)
    for z in _product_support(channel, y):
        z_index = _sequence_index(q, z)
        target = g.decode[z_index]
        if target is None:
            return DOMINATED
        prob = Fraction(1)
        for zi, yi in zip(z, y):
            prob *= channel.prob(zi, yi)
        t_symbols = BlockSequence.from_index(q, n, target).symbols
        total += prob * block_utility(U, t_symbols, x)
    return total


def noisy_receiver_strategy(I_s, I_c, channel: Channel, n: int
                            ) -> ReceiverStrategy:
    """Partition decoder: each distinguishable input's output support maps to
    one protected source sequence, everything else to the error symbol.

    Pairing is by ascending canonical index on both sides; the expected
    utilities do not depend on the pairing choice.
    """
    xs = sorted(I_s.vertices if isinstance(I_s, IndependentSetWitness) else I_s)
    ys = sorted(I_c.vertices if isinstance(I_c, IndependentSetWitness) else I_c)
    if len(xs) != len(ys):
        raise InputError(f"set sizes differ: {len(xs)} protected vs {len(ys)} inputs")
    q = channel.q
    nv = q**n
    decode: list[int | None] = [None] * nv
    for x, y in zip(xs, ys):
        for z in output_support_indices(channel, y, n):
            if decode[z] is not None:
                raise InputError(
                    "input supports overlap; the input set is not independent "
                    "in the confusability graph"
                )
            decode[z] = x
    return ReceiverStrategy(n, tuple(decode))


def verify_noisy_equilibrium(U: UtilityMatrix, channel: Channel,
                             g: ReceiverStrategy, xs, ys, n: int) -> bool:
    """Per-alternative-input dominance check for the partition strategy.

    For each protected source x paired with input y*, every alternative input
    is either dominated (can hit an undecoded output), strictly worse, or has
    its support inside y*'s support with expected utility exactly zero, so
    truthful signalling is forced and x is recovered under every best
    response.
    """
    q = U.q
    nv = q**n
    supports = {y: output_support_indices(channel, y, n) for y in range(nv)}
    for x, y_star in zip(xs, ys):
        for y in range(nv):
            value = expected_block_utility(U, channel, g, y, x, n)
            if value is DOMINATED:
                continue
            if value < 0:
                continue
            if value == 0 and supports[y] <= supports[y_star]:
                continue
            return False
    return True


def noisy_equilibrium_value(U: UtilityMatrix, channel: Channel, n: int,
                            budget: int = DEFAULT_NODE_BUDGET
                            ) -> tuple[int, ReceiverStrategy]:
    """Equilibrium decoded count over a noisy channel: the smaller of the
    sender-graph and confusability-graph independence numbers, achieved by
    the partition decoder and verified by the dominance check."""
    gs = sender_graph(U, n)
    alpha_s, wit_s = independence_number(gs, budget=budget)
    gc = confusability_graph(channel, n)
    alpha_c, wit_c = independence_number(gc, budget=budget)
    d = min(alpha_s, alpha_c)
    xs = wit_s.vertices[:d]
    ys = wit_c.vertices[:d]
    strategy = noisy_receiver_strategy(xs, ys, channel, n)
    if not verify_noisy_equilibrium(U, channel, strategy, xs, ys, n):
        raise AssertionError("noisy equilibrium verification failed")
    return d, strategy


def asymptotic_rate_bracket(U: UtilityMatrix, channel: Channel, n_max: int = 2,
                            tol: float = 1e-3,
                            budget: int = DEFAULT_NODE_BUDGET) -> CapacityBracket:
    """Bracket on the noisy-channel extraction rate: the elementwise minimum
    of the capacity bracket and the channel's zero-error capacity bracket,
    with the sender-side and channel-side closure rules applied when the
    certificates permit."""
    xi = xi_bracket(U, n_max=n_max, tol=tol, node_budget=budget)
    warnings = list(xi.warnings)

    gc = confusability_graph(channel, 1)
    gc_lower, gc_lower_cert = 1.0, {"name": "trivial", "n": 1}
    power = None
    for n in range(1, n_max + 1):
        power = confusability_graph(channel, n)
        alpha, wit = independence_number(power, budget=budget)
        value = alpha ** (1.0 / n)
        if value > gc_lower:
            gc_lower = value
            gc_lower_cert = {
                "name": "alpha_confusability_power", "n": n, "alpha": alpha,
                "witness": list(wit.labels or wit.vertices),
            }
    theta_c = lovasz_theta(gc, tol=min(tol, 1e-3))
    gc_upper, gc_upper_cert = theta_c + tol, {
        "name": "theta_confusability", "theta": theta_c, "tol": tol,
    }
    if float(U.q) < gc_upper:
        gc_upper, gc_upper_cert = float(U.q), {"name": "alphabet_size", "q": U.q}

    if xi.lower <= gc_lower:
        lower, lower_cert = xi.lower, xi.lower_certificate
    else:
        lower, lower_cert = gc_lower, gc_lower_cert
    if xi.upper <= gc_upper:
        upper, upper_cert = xi.upper, xi.upper_certificate
    else:
        upper, upper_cert = gc_upper, gc_upper_cert

    exact: ExactValue | None = None
    if xi.exact is not None and xi.exact.value <= gc_lower + 1e-12:
        # capacity side closes and the channel certifiably carries it
        exact = xi.exact
    else:
        gamma_value, _ = gamma(U)
        if gamma_value >= gc_upper:
            # channel side closes: the single-letter bound already exceeds
            # the channel's certified zero-error ceiling
            lower, lower_cert = gc_lower, gc_lower_cert
            upper, upper_cert = gc_upper, gc_upper_cert
            t = round(gc_lower)
            if t == gc_lower and gc_upper - t <= 2 * tol:
                exact = ExactValue(t, 1)

    return CapacityBracket(
        lower=lower,
        lower_certificate=lower_cert,
        upper=upper,
        upper_certificate=upper_cert,
        tol=tol,
        exact=exact,
        warnings=tuple(warnings),
    )


def strategy_to_json_dict(U: UtilityMatrix, g: ReceiverStrategy) -> dict:
    q = U.q
    decode = {}
    for z, target in enumerate(g.decode):
        z_label = sequence_label(U.alphabet, BlockSequence.from_index(q, g.n, z).symbols)
        if target is None:
            decode[z_label] = "DELTA"
        else:
            decode[z_label] = sequence_label(
                U.alphabet, BlockSequence.from_index(q, g.n, target).symbols)
    return {"n": g.n, "decode": decode}


def strategy_from_json_dict(U: UtilityMatrix, obj) -> ReceiverStrategy:
    if not isinstance(obj, dict) or "n" not in obj or "decode" not in obj:
        raise InputError('strategy JSON must be an object with "n" and "decode"')
    n = int(obj["n"])
    q = U.q
    nv = q**n
    label_to_index = {
        sequence_label(U.alphabet, BlockSequence.from_index(q, n, i).symbols): i
        for i in range(nv)
    }
    decode: list[int | None] = [None] * nv
    seen = set()
    for z_label, t_label in obj["decode"].items():
        if z_label not in label_to_index:
            raise InputError(f"unknown output sequence label {z_label!r}")
        z = label_to_index[z_label]
        seen.add(z)
        if t_label == "DELTA":
            decode[z] = None
        elif t_label in label_to_index:
            decode[z] = label_to_index[t_label]
        else:
            raise InputError(f"unknown decoded sequence label {t_label!r}")
    missing = nv - len(seen)
    if missing:
        raise InputError(f"strategy table is missing {missing} output sequences")
    return ReceiverStrategy(n, tuple(decode))


def load_strategy(U: UtilityMatrix, path) -> ReceiverStrategy:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read strategy file {path}: {exc}") from exc
    return strategy_from_json_dict(U, obj)
