"""Level-2 moment problems for Bell scenarios with binary inputs.

Each binary measurement is represented by the projector onto outcome 0; the
other projector is ``1 - Pi``.  An eavesdropper, when present, has a single
measurement with four outcomes, represented by three independent projectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..behavior import BellFunctional
from ..errors import UnsupportedScenario
from .monomials import Symbol, Word, level2_basis, moment_key, word_str


class Affine:
    """Sparse affine expression ``const + sum_k coef_k * y_k`` in the moments."""

    __slots__ = ("coef", "const")

    def __init__(self, coef: Optional[dict[int, float]] = None, const: float = 0.0):
        self.coef = {k: v for k, v in (coef or {}).items() if v != 0}
        self.const = float(const)

    def __add__(self, other):
        if not isinstance(other, Affine):
            return Affine(self.coef, self.const + float(other))
        c = dict(self.coef)
        for k, v in other.coef.items():
            c[k] = c.get(k, 0.0) + v
        return Affine(c, self.const + other.const)

    __radd__ = __add__

    def __mul__(self, k: float):
        k = float(k)
        return Affine({i: k * v for i, v in self.coef.items()}, k * self.const)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other if isinstance(other, Affine) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def dense(self, m: int) -> np.ndarray:
        v = np.zeros(m)
        for k, c in self.coef.items():
            v[k] += c
        return v

    def value(self, y: np.ndarray) -> float:
        return self.const + sum(c * y[k] for k, c in self.coef.items())


@dataclass(frozen=True)
class NpaScenario:
    """``parties`` lists ``(name, n_inputs, n_outcomes)``."""

    parties: tuple[tuple[str, int, int], ...]

    @classmethod
    def bipartite(cls) -> "NpaScenario":
        return cls((("A", 2, 2), ("B", 2, 2)))

    @classmethod
    def tripartite(cls) -> "NpaScenario":
        return cls((("A", 2, 2), ("B", 2, 2), ("E", 1, 4)))


@dataclass
class MomentProblem:
    scenario: NpaScenario
    basis: list[Word]
    moments: list[Word]
    index: np.ndarray  # (n, n) moment id per cell, -1 where the word vanishes
    equalities: list[tuple[Affine, float]] = field(default_factory=list)
    inequalities: list[tuple[Affine, float]] = field(default_factory=list)  # expr >= rhs
    objective: Affine = field(default_factory=Affine)
    sense: str = "max"
    metadata: dict = field(default_factory=lambda: {"level": 2, "localizing": False})

    @property
    def size(self) -> int:
        return len(self.basis)

    @property
    def n_moments(self) -> int:
        return len(self.moments)

    def _moment(self, word: Sequence[Symbol]) -> Affine:
        k = moment_key(word)
        if k is None:
            return Affine()
        if k == ():
            return Affine(const=1.0)
        try:
            return Affine({self._lookup[k]: 1.0})
        except KeyError:
            raise UnsupportedScenario(f"word {word_str(k)} is not a level-2 moment") from None

    def __post_init__(self):
        self._lookup = {k: i for i, k in enumerate(self.moments)}
        self._parties = {name: (nin, nout) for name, nin, nout in self.scenario.parties}

    # projectors as lists of (coefficient, word) --------------------------------
    def _proj(self, party: str, x: int, a: int) -> list[tuple[float, Word]]:
        nin, nout = self._parties[party]
        if not (0 <= x < nin and 0 <= a < nout):
            raise UnsupportedScenario(f"{party}: input {x} / outcome {a} out of range")
        if a < nout - 1:
            return [(1.0, (Symbol(party, x, a),))]
        # last outcome is the complement of the others
        return [(1.0, ())] + [(-1.0, (Symbol(party, x, o),)) for o in range(nout - 1)]

    def joint(self, *factors: tuple[str, int, int]) -> Affine:
        """``<prod Pi_{a|x}>`` for factors ``(party, x, a)`` of distinct parties."""
        terms: list[tuple[float, Word]] = [(1.0, ())]
        for party, x, a in factors:
            terms = [(c1 * c2, w1 + w2) for c1, w1 in terms for c2, w2 in self._proj(party, x, a)]
        out = Affine()
        for c, w in terms:
            out = out + c * self._moment(w)
        return out

    def prob(self, a: int, b: int, x: int, y: int) -> Affine:
        return self.joint(("A", x, a), ("B", y, b))

    def prob_e(self, a: int, b: int, e: int, x: int, y: int) -> Affine:
        if "E" not in self._parties:
            raise UnsupportedScenario("scenario has no eavesdropper")
        return self.joint(("A", x, a), ("B", y, b), ("E", 0, e))

    def functional(self, f: BellFunctional) -> Affine:
        """Bell functional as an affine expression in the moments."""
        nx, ny, na, nb = f.scenario
        if (nx, ny, na, nb) != (2, 2, 2, 2):
            raise UnsupportedScenario("moment problems cover the 2-input 2-output scenario only")
        out = Affine(const=f.offset)
        for x in range(nx):
            for y in range(ny):
                for a in range(na):
                    for b in range(nb):
                        if f.joint[x, y, a, b]:
                            out = out + f.joint[x, y, a, b] * self.prob(a, b, x, y)
        for x in range(nx):
            for a in range(na):
                if f.marg_a[x, a]:
                    out = out + f.marg_a[x, a] * self.joint(("A", x, a))
        for y in range(ny):
            for b in range(nb):
                if f.marg_b[y, b]:
                    out = out + f.marg_b[y, b] * self.joint(("B", y, b))
        return out

    def copy(self) -> "MomentProblem":
        return MomentProblem(self.scenario, list(self.basis), list(self.moments), self.index.copy(),
                             list(self.equalities), list(self.inequalities), self.objective,
                             self.sense, dict(self.metadata))

    def describe(self) -> dict:
        return {"basis": [word_str(w) for w in self.basis], "n_moments": self.n_moments,
                **self.metadata}


def build_npa2(scenario: NpaScenario) -> MomentProblem:
    """Level-2 moment matrix skeleton (no objective, no extra constraints)."""
    parties = scenario.parties
    ok = parties == NpaScenario.bipartite().parties or parties == NpaScenario.tripartite().parties
    if not ok:
        raise UnsupportedScenario(f"unsupported scenario {parties}; expected bipartite 2/2/2/2 "
                                  "optionally with an eavesdropper holding one 4-outcome measurement")
    symbols = []
    for name, nin, nout in parties:
        for x in range(nin):
            for a in range(nout - 1):
                symbols.append(Symbol(name, x, a))
    basis = level2_basis(symbols)
    n = len(basis)
    moments: list[Word] = [()]
    lookup = {(): 0}
    index = np.full((n, n), -1, dtype=int)
    for i, u in enumerate(basis):
        for j, v in enumerate(basis):
            k = moment_key(tuple(reversed(u)) + v)
            if k is None:
                continue
            if k not in lookup:
                lookup[k] = len(moments)
                moments.append(k)
            index[i, j] = lookup[k]
    return MomentProblem(scenario, basis, moments, index)
