"""Discrete memoryless channels with exact row-stochastic transition matrices.

Zero-error questions depend only on the support sets, so positivity is
decided exactly on the stored rationals; no epsilon thresholds anywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import InputError
from .utility import Alphabet, parse_rational


@dataclass(frozen=True)
class Channel:
    """Row-stochastic q x q transition matrix; rows[y][z] = P(z | y)."""

    alphabet: Alphabet
    rows: tuple[tuple[Fraction, ...], ...]
    support: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.alphabet.q

    def prob(self, z: int, y: int) -> Fraction:
        return self.rows[y][z]

    def support_set(self, y: int) -> tuple[int, ...]:
        mask = self.support[y]
        return tuple(z for z in range(self.q) if (mask >> z) & 1)

    def is_noiseless(self) -> bool:
        return all(self.support[y] == 1 << y for y in range(self.q))

    def to_json_dict(self) -> dict:
        def render(x: Fraction):
            return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        return {
            "alphabet": list(self.alphabet.symbols),
            "rows": [[render(x) for x in row] for row in self.rows],
        }


def make_channel(alphabet: Alphabet, rows) -> Channel:
    q = alphabet.q
    parsed = []
    for y, row in enumerate(rows):
        if len(row) != q:
            raise InputError(f"channel row {y} has {len(row)} entries, expected {q}")
        entries = tuple(parse_rational(x) for x in row)
        if any(x < 0 for x in entries):
            raise InputError(f"channel row {y} has a negative probability")
        if sum(entries) != 1:
            raise InputError(f"channel row {y} sums to {sum(entries)}, expected 1")
        parsed.append(entries)
    if len(parsed) != q:
        raise InputError(f"channel must have {q} rows, got {len(parsed)}")
    support = tuple(
        sum(1 << z for z, x in enumerate(row) if x > 0) for row in parsed
    )
    return Channel(alphabet, tuple(parsed), support)


def channel_from_json(obj) -> Channel:
    if not isinstance(obj, dict) or "rows" not in obj:
        raise InputError('channel JSON must be an object with a "rows" matrix')
    rows = obj["rows"]
    if "alphabet" in obj:
        alphabet = Alphabet(tuple(str(s) for s in obj["alphabet"]))
    else:
        alphabet = Alphabet.of_size(len(rows))
    return make_channel(alphabet, rows)


def load_channel(path) -> Channel:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(), parse_float=Fraction)
    except (OSError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot read channel file {path}: {exc}") from exc
    return channel_from_json(obj)


def identity_channel(alphabet: Alphabet) -> Channel:
    q = alphabet.q
    rows = [[Fraction(1) if z == y else Fraction(0) for z in range(q)] for y in range(q)]
    return make_channel(alphabet, rows)
