"""Words in projector symbols and their canonical forms.

A symbol ``(party, input, outcome)`` stands for the projector ``Pi_{outcome|input}``
of that party.  Operators of different parties commute, so a word is
canonicalized by a stable sort on party.  Within a party, adjacent equal
projectors collapse (idempotence) and adjacent orthogonal ones (same input,
different outcome) annihilate the word.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple, Optional, Sequence


PARTY_ORDER = {"A": 0, "B": 1, "E": 2}


class Symbol(NamedTuple):
    party: str
    input: int
    outcome: int

    def __str__(self) -> str:
        return f"{self.party}{self.input}" if self.party != "E" else f"E{self.outcome}"


Word = tuple[Symbol, ...]


def canonical(word: Sequence[Symbol]) -> Optional[Word]:
    """Canonical form of ``word`` or ``None`` if the product is zero."""
    ordered = sorted(word, key=lambda s: PARTY_ORDER[s.party])
    out: list[Symbol] = []
    for s in ordered:
        if out and out[-1].party == s.party and out[-1].input == s.input:
            if out[-1].outcome == s.outcome:
                continue
            return None
        out.append(s)
    return tuple(out)


def moment_key(word: Sequence[Symbol]) -> Optional[Word]:
    """Label of ``<word>`` for a real moment matrix.

    A real feasible point can always be chosen, so ``<w>`` and ``<w^dagger>``
    are identified; the label is the smaller of the two canonical forms.
    """
    c = canonical(word)
    if c is None:
        return None
    r = canonical(tuple(reversed(tuple(word))))
    return min(c, r)


def word_str(word: Word) -> str:
    return "1" if not word else "".join(str(s) for s in word)


def level2_basis(symbols: Sequence[Symbol]) -> list[Word]:
    """Identity, all single symbols, then all nonzero canonical products of two.

    Order is deterministic: products follow the order of ``symbols``.
    """
    basis: list[Word] = [()]
    seen = {()}
    for s in symbols:
        basis.append((s,))
        seen.add((s,))
    for s, t in itertools.product(symbols, symbols):
        c = canonical((s, t))
        if c is not None and len(c) == 2 and c not in seen:
            seen.add(c)
            basis.append(c)
    return basis
