"""The 15-vertex 01-gadget in R^4, its {0,1}-colorings and its four rotated copies."""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from ..errors import OrthogonalityFailure, SearchBoundExceeded
from .field import S3, Vec, dot, is_zero, parallel, rank, vec

MAX_COLORING_VERTICES = 25


@dataclass
class GadgetGraph:
    """Vertices carry exact unnormalized vectors; edges are exact orthogonalities."""

    vectors: list[Vec]
    labels: list[str]
    distinguished: tuple[int, int]
    edges: set[tuple[int, int]] = field(default_factory=set)
    cliques: list[tuple[int, ...]] = field(default_factory=list)
    copy_of: list[tuple[int, int]] = field(default_factory=list)  # (copy, original index)

    def __post_init__(self):
        if not self.edges:
            self.edges = orthogonality_edges(self.vectors)
        if not self.cliques:
            self.cliques = maximal_cliques(len(self.vectors), self.edges)

    @property
    def n(self) -> int:
        return len(self.vectors)

    def adjacent(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def clique_number(self) -> int:
        return max((len(c) for c in self.cliques), default=0)

    def check_faithful(self) -> None:
        for i, v in enumerate(self.vectors):
            if is_zero(v):
                raise ValueError(f"vertex {self.labels[i]} has the zero vector")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if parallel(self.vectors[i], self.vectors[j]):
                    raise ValueError(f"vertices {self.labels[i]} and {self.labels[j]} are parallel")
        a, b = self.distinguished
        if self.adjacent(a, b):
            raise ValueError("distinguished vertices are adjacent")


def orthogonality_edges(vectors) -> set[tuple[int, int]]:
    n = len(vectors)
    return {(i, j) for i in range(n) for j in range(i + 1, n) if not dot(vectors[i], vectors[j])}


def maximal_cliques(n: int, edges) -> list[tuple[int, ...]]:
    """All maximal cliques, each sorted, listed in lexicographic order."""
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    return sorted(tuple(sorted(c)) for c in nx.find_cliques(g))


GADGET15 = [
    vec(1, 0, 0, 0),
    vec(0, 4, 1, 1),
    vec(0, 0, 1, 1),
    vec(-3 - S3, -5 + S3, 1 + S3, 1 + S3),
    vec(3 + S3, -3 - S3, 3 - S3, 3 - S3),
    vec(3 - S3, 1 + S3, 1 + S3, 1 + S3),
    vec(-3, 1, -2, -2),
    vec(1, 1, 0, 0),
    vec(3 + S3, 1 - S3, 1 - S3, 1 - S3),
    vec(-3 + S3, -5 - S3, 1 - S3, 1 - S3),
    vec(-3 + S3, 3 - S3, -3 - S3, -3 - S3),
    vec(3, 1, -2, -2),
    vec(-1, 1, 0, 0),
    vec(1, 1, 1, 1),
    vec(0, 0, 1, -1),
]


def build_gadget15() -> GadgetGraph:
    """The 01-gadget with distinguished pair ``(v1, v14)`` (indices 0 and 13)."""
    g = GadgetGraph(list(GADGET15), [f"v{k}" for k in range(1, 16)], (0, 13))
    g.check_faithful()
    return g


# --- colorings ---------------------------------------------------------------------

@dataclass(frozen=True)
class ColoringReport:
    n_vertices: int
    n_cliques: int
    clique_number: int
    colorings_all_maximal: int        # exactly one 1 in every maximal clique
    distinguished_all_maximal: int    # of those, with both distinguished vertices at 1
    colorings_max_size: int           # exactly one 1 in every clique of size omega, at most one elsewhere
    distinguished_max_size: int
    degenerate: bool                  # no clique with two or more vertices

    @property
    def certified(self) -> bool:
        return self.distinguished_all_maximal == 0 and self.distinguished_max_size == 0


def _assignments(n: int) -> np.ndarray:
    idx = np.arange(2**n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.int8)


def verify_gadget_coloring(g: GadgetGraph) -> ColoringReport:
    """Exhaustive search over all {0,1}-assignments of the vertices.

    Two readings of the clique condition are checked: every maximal clique has
    exactly one 1, and the weaker one where only cliques of maximum size must
    contain a 1 (smaller maximal cliques need at most one).  Adjacent vertices
    are never both 1 in either.
    """
    n = g.n
    if n > MAX_COLORING_VERTICES:
        raise SearchBoundExceeded(f"{n} vertices exceed the exhaustive bound {MAX_COLORING_VERTICES}")
    F = _assignments(n)
    ok = np.ones(len(F), dtype=bool)
    for i, j in g.edges:
        ok &= ~((F[:, i] == 1) & (F[:, j] == 1))
    omega = g.clique_number()
    strict = ok.copy()
    loose = ok.copy()
    for c in g.cliques:
        s = F[:, list(c)].sum(axis=1)
        strict &= s == 1
        loose &= (s == 1) if len(c) == omega else (s <= 1)
    a, b = g.distinguished
    both = (F[:, a] == 1) & (F[:, b] == 1)
    degenerate = all(len(c) < 2 for c in g.cliques)
    return ColoringReport(n, len(g.cliques), omega, int(strict.sum()), int((strict & both).sum()),
                          int(loose.sum()), int((loose & both).sum()), degenerate)


# --- rotated copies ------------------------------------------------------------------

def rotations(v: Vec) -> list[Vec]:
    """The vector and its three images under left multiplication by quaternion units."""
    a, b, c, d = v
    return [(a, b, c, d), (b, -a, -d, c), (c, d, -a, -b), (d, -c, b, -a)]


def gram(vectors) -> list[list]:
    return [[dot(u, v) for v in vectors] for u in vectors]


def rotate_copies(g: GadgetGraph) -> GadgetGraph:
    """Four copies of the gadget whose k-th vertices form orthogonal bases.

    Vertex ``(c, k)`` gets index ``15*c + k``.  Raises OrthogonalityFailure if
    any quadruple is not an orthogonal basis or a copy changes the Gram matrix.
    """
    if any(len(v) != 4 for v in g.vectors):
        raise OrthogonalityFailure("rotations are defined in dimension 4 only")
    images = [rotations(v) for v in g.vectors]
    for k, quad in enumerate(images):
        for i in range(4):
            for j in range(i + 1, 4):
                if dot(quad[i], quad[j]):
                    raise OrthogonalityFailure(f"copies of {g.labels[k]} are not orthogonal ({i}, {j})")
        if rank(quad) != 4:
            raise OrthogonalityFailure(f"copies of {g.labels[k]} do not span dimension 4")
    base = gram(g.vectors)
    vectors, labels, copy_of = [], [], []
    for c in range(4):
        copy = [images[k][c] for k in range(g.n)]
        if gram(copy) != base:
            raise OrthogonalityFailure(f"copy {c + 1} changes the Gram matrix")
        vectors += copy
        labels += [f"{g.labels[k]}^({c + 1})" for k in range(g.n)]
        copy_of += [(c, k) for k in range(g.n)]
    a, b = g.distinguished
    out = GadgetGraph(vectors, labels, (a, b), copy_of=copy_of)
    # each copy's internal edges match the original's under the index shift
    for c in range(4):
        internal = {(i - c * g.n, j - c * g.n) for i, j in out.edges
                    if c * g.n <= i < (c + 1) * g.n and c * g.n <= j < (c + 1) * g.n}
        if internal != g.edges:
            raise OrthogonalityFailure(f"copy {c + 1} has a different edge set")
    return out
