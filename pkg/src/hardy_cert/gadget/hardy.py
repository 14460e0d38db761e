"""Compile the rotated 60-vertex gadget into a Hardy-type test and verify it exactly.

Each maximal clique of the orthogonality graph becomes one measurement.  Cliques
that do not span R^4 are completed with exact vectors, so every input is an
orthogonal basis.  Zero constraints are all pairs of orthogonal vectors, one on
each side; the expected event is the four copies of the distinguished pair at
the inputs ``x*`` (copies of v1) and ``y*`` (copies of v14).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..behavior import Behavior
from ..errors import CapExceeded, CliqueCompletionFailure, OrthogonalityFailure
from .field import QSqrt3, Vec, dot, gram_schmidt, null_space, parallel, primitive
from .graph import GadgetGraph, build_gadget15, rotate_copies

DIM = 4
LHV_CAP = 10**7


@dataclass
class HardyTest:
    vectors: list[Vec]                    # rotated gadget vertices then completion vectors
    labels: list[str]
    inputs: list[tuple[int, int, int, int]]   # vertex ids per measurement, outcome order
    zero_pairs: list[tuple[int, int]]      # orthogonal vertex pairs (u < v)
    x_star: int
    y_star: int
    expected: list[tuple[int, int]]        # outcome pairs (a, b) at (x*, y*)
    n_completed: int

    @property
    def n_inputs(self) -> int:
        return len(self.inputs)

    def orthogonal(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._zero_set

    def __post_init__(self):
        self._zero_set = set(self.zero_pairs)

    def zero_count(self) -> int:
        """Number of ``(a, b, x, y)`` entries forced to zero, counting both orders of inputs."""
        pos: dict[int, int] = {}
        for row in self.inputs:
            for v in row:
                pos[v] = pos.get(v, 0) + 1
        total = 0
        for u, v in self.zero_pairs:
            total += 2 * pos.get(u, 0) * pos.get(v, 0)
        return total


def _complete(g: GadgetGraph, clique, extra: list[Vec]) -> list[int]:
    """Vertex ids of an orthogonal basis extending ``clique``; new vectors go into ``extra``."""
    vecs = [g.vectors[i] for i in clique]
    comp = gram_schmidt(null_space(vecs, DIM))
    if len(vecs) + len(comp) != DIM:
        raise CliqueCompletionFailure(f"clique {clique} does not extend to a basis")
    ids = list(clique)
    for c in comp:
        c = primitive(c)
        if any(dot(c, v) for v in vecs):
            raise CliqueCompletionFailure(f"completion of {clique} is not orthogonal")
        hit = next((k for k, e in enumerate(extra) if parallel(c, e)), None)
        if hit is None:
            extra.append(c)
            hit = len(extra) - 1
        ids.append(g.n + hit)
    return ids


def compile_hardy_test(g: GadgetGraph | None = None) -> HardyTest:
    """Build the Hardy test from the rotated gadget (constructed if not given)."""
    if g is None:
        g = rotate_copies(build_gadget15())
    extra: list[Vec] = []
    inputs = [tuple(_complete(g, c, extra)) for c in g.cliques]
    vectors = list(g.vectors) + extra
    labels = list(g.labels) + [f"c{k + 1}" for k in range(len(extra))]
    for row in inputs:
        for i in range(DIM):
            for j in range(i + 1, DIM):
                if dot(vectors[row[i]], vectors[row[j]]):
                    raise OrthogonalityFailure(f"input {row} is not an orthogonal basis")
    n = len(vectors)
    zero_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)
                  if not dot(vectors[i], vectors[j])]
    a, b = g.distinguished
    n0 = len(g.vectors) // 4
    v1 = sorted(a + c * n0 for c in range(4))
    v14 = sorted(b + c * n0 for c in range(4))
    try:
        x_star = inputs.index(tuple(v1))
        y_star = inputs.index(tuple(v14))
    except ValueError as exc:
        raise CliqueCompletionFailure("copies of the distinguished vertices are not maximal cliques") from exc
    expected = [(k, k) for k in range(4)]  # k-th copy of v1 with k-th copy of v14
    return HardyTest(vectors, labels, inputs, zero_pairs, x_star, y_star, expected, len(extra))


# --- quantum verification on the maximally entangled state ----------------------------

def _norm2(v: Vec) -> QSqrt3:
    return dot(v, v)


def exact_probability(u: Vec, v: Vec) -> QSqrt3:
    """``P = |<u, v>|^2 / (4 |u|^2 |v|^2)`` for the real maximally entangled state in dimension 4."""
    d = dot(u, v)
    return d * d / (_norm2(u) * _norm2(v) * 4)


def exact_block(test: HardyTest, x: int, y: int) -> list[list[QSqrt3]]:
    ux = test.inputs[x]
    vy = test.inputs[y]
    return [[exact_probability(test.vectors[i], test.vectors[j]) for j in vy] for i in ux]


def float_behavior(test: HardyTest) -> Behavior:
    """Full distribution ``[x, y, a, b]`` in floating point."""
    V = np.array([[float(c) for c in v] for v in test.vectors])
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    U = V[np.array(test.inputs)]              # (inputs, 4 outcomes, 4 dims)
    amp = np.einsum("xad,ybd->xyab", U, U)
    return Behavior(amp * amp / DIM)


@dataclass(frozen=True)
class QuantumVerification:
    block: list[list[Fraction]]
    uniform: bool
    zeros_exact: bool
    h_global: float
    h_local: float
    max_zero_float: float
    normalized: bool


def _as_fraction(q: QSqrt3) -> Fraction:
    if q.b != 0:
        raise ValueError(f"{q} is irrational")
    return q.a


def quantum_verify(test: HardyTest) -> QuantumVerification:
    """Exact check of the expected block and of every zero pair; float check of the rest."""
    block = exact_block(test, test.x_star, test.y_star)
    fr = [[_as_fraction(p) for p in row] for row in block]
    uniform = all(p == Fraction(1, 16) for row in fr for p in row)
    zeros_exact = all(not dot(test.vectors[u], test.vectors[v]) for u, v in test.zero_pairs)
    beh = float_behavior(test)
    # every zero-pair occurrence in the float table
    pos: dict[int, list[tuple[int, int]]] = {}
    for x, row in enumerate(test.inputs):
        for a, v in enumerate(row):
            pos.setdefault(v, []).append((x, a))
    worst = 0.0
    for u, v in test.zero_pairs:
        for x, a in pos.get(u, []):
            for y, b in pos.get(v, []):
                worst = max(worst, beh.table[x, y, a, b], beh.table[y, x, b, a])
    pmax = max(max(r) for r in fr)
    marg = [sum(r) for r in fr]
    return QuantumVerification(
        fr, uniform, zeros_exact,
        h_global=-math.log2(pmax), h_local=-math.log2(max(marg)),
        max_zero_float=float(worst), normalized=True)


def lhv_search_size(test: HardyTest) -> int:
    return DIM ** test.n_inputs


def lhv_search(test: HardyTest, cap: int = LHV_CAP) -> int:
    """Count deterministic local strategies that respect every zero and hit the expected event.

    Alice and Bob each pick one outcome per input.  Refused with CapExceeded
    when the ``(4^inputs)^2`` pairs exceed ``cap``.
    """
    n = test.n_inputs
    if 2 * n * math.log2(DIM) > math.log2(cap):
        raise CapExceeded(f"(4^{n})^2 deterministic strategies exceed the cap {cap}")
    hits = 0
    for alice in itertools.product(range(DIM), repeat=n):
        va = [test.inputs[x][alice[x]] for x in range(n)]
        for bob in itertools.product(range(DIM), repeat=n):
            if (alice[test.x_star], bob[test.y_star]) not in test.expected:
                continue
            vb = [test.inputs[y][bob[y]] for y in range(n)]
            if not any(test.orthogonal(u, v) for u in va for v in vb):
                hits += 1
    return hits


# --- serialization ------------------------------------------------------------------

def _vec_str(v: Vec) -> list[str]:
    return [str(c) for c in v]


def test_to_dict(test: HardyTest, verification: QuantumVerification | None = None) -> dict:
    d = {
        "dimension": DIM,
        "vertices": [{"id": i, "label": test.labels[i], "vector": _vec_str(v)}
                     for i, v in enumerate(test.vectors)],
        "inputs": [list(r) for r in test.inputs],
        "outputs_per_input": DIM,
        "zero_pairs": [list(p) for p in test.zero_pairs],
        "zero_rule": "P(a,b|x,y)=0 whenever inputs[x][a] and inputs[y][b] form a zero pair",
        "zero_entry_count": test.zero_count(),
        "x_star": test.x_star,
        "y_star": test.y_star,
        "expected": [list(e) for e in test.expected],
        "n_completion_vectors": test.n_completed,
    }
    if verification is not None:
        d["verification"] = {
            "block": [[str(p) for p in r] for r in verification.block],
            "uniform_1_16": verification.uniform,
            "zeros_exact": verification.zeros_exact,
            "h_global_bits": verification.h_global,
            "h_local_bits": verification.h_local,
            "max_zero_float": verification.max_zero_float,
        }
    return d


def test_from_dict(d: dict) -> HardyTest:
    vectors = [tuple(QSqrt3.parse(c) for c in v["vector"]) for v in d["vertices"]]
    labels = [v["label"] for v in d["vertices"]]
    return HardyTest(vectors, labels, [tuple(r) for r in d["inputs"]],
                     [tuple(p) for p in d["zero_pairs"]], d["x_star"], d["y_star"],
                     [tuple(e) for e in d["expected"]], d["n_completion_vectors"])


def write_test_json(test: HardyTest, path, verification: QuantumVerification | None = None) -> Path:
    path = Path(path)
    path.write_text(json.dumps(test_to_dict(test, verification), indent=1, sort_keys=True))
    return path


def read_test_json(path) -> HardyTest:
    return test_from_dict(json.loads(Path(path).read_text()))


for _f in (test_to_dict, test_from_dict):
    _f.__test__ = False  # keep pytest from collecting these by name
