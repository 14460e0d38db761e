import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardy_cert.errors import CapExceeded, OrthogonalityFailure, SearchBoundExceeded
from hardy_cert.gadget.field import (QSqrt3, S3, dot, gram_schmidt, null_space, parallel,
                                     primitive, rank, vec)
from hardy_cert.gadget.graph import (GADGET15, GadgetGraph, build_gadget15, rotate_copies,
                                     rotations, verify_gadget_coloring)
from hardy_cert.gadget.hardy import (compile_hardy_test, exact_probability, float_behavior,
                                     lhv_search, quantum_verify, read_test_json, write_test_json)

import oracles as o

rat = st.fractions(min_value=-20, max_value=20, max_denominator=12)
qs3 = st.builds(QSqrt3, rat, rat)
vec4 = st.tuples(qs3, qs3, qs3, qs3)


@pytest.fixture(scope="module")
def g15():
    return build_gadget15()


@pytest.fixture(scope="module")
def g60(g15):
    return rotate_copies(g15)


@pytest.fixture(scope="module")
def test60(g60):
    return compile_hardy_test(g60)


# --- field -----------------------------------------------------------------------------

@given(qs3, qs3)
def test_field_ops_match_floats(x, y):
    assert float(x + y) == pytest.approx(float(x) + float(y), abs=1e-9)
    assert float(x * y) == pytest.approx(float(x) * float(y), rel=1e-9, abs=1e-9)
    if y:
        assert (x / y) * y == x


@given(qs3)
def test_sign_matches_float(x):
    f = float(x)
    if abs(f) > 1e-9:
        assert x.sign() == (1 if f > 0 else -1)
    assert x.sign() == 0 if not x else x.sign() != 0


@given(qs3)
def test_parse_round_trip(x):
    assert QSqrt3.parse(str(x)) == x


@given(vec4)
def test_primitive_is_parallel_integral(v):
    p = primitive(v)
    if any(v):
        assert parallel(p, v)
        assert all(c.a.denominator == 1 and c.b.denominator == 1 for c in p)
        assert next(c for c in p if c).sign() > 0


@given(st.lists(vec4, min_size=1, max_size=3))
def test_null_space_and_gram_schmidt(vs):
    ns = null_space(vs, 4)
    assert rank(vs) + len(ns) == 4
    for n in ns:
        assert all(not dot(n, v) for v in vs)
    gs = gram_schmidt(ns)
    assert len(gs) == len(ns)
    for i in range(len(gs)):
        for j in range(i + 1, len(gs)):
            assert not dot(gs[i], gs[j])


# --- 15-vertex gadget -------------------------------------------------------------------

def test_gadget15_graph(g15):
    assert g15.n == 15
    assert len(g15.edges) == 35
    assert len(g15.cliques) == 13
    assert g15.clique_number() == 4
    assert not g15.adjacent(*g15.distinguished)


def test_edges_match_float_orthogonality(g15):
    V = np.array([[float(c) for c in v] for v in GADGET15])
    G = V @ V.T
    float_edges = {(i, j) for i in range(15) for j in range(i + 1, 15) if abs(G[i, j]) < 1e-9}
    assert float_edges == g15.edges


def test_coloring_search(g15):
    rep = verify_gadget_coloring(g15)
    assert rep.certified and not rep.degenerate
    assert rep.distinguished_all_maximal == 0 and rep.distinguished_max_size == 0
    assert rep.colorings_all_maximal == 1
    assert rep.colorings_max_size == 73


def test_coloring_counts_against_pure_python_oracle(g15):
    edges, cliques, d = sorted(g15.edges), g15.cliques, g15.distinguished
    assert o.coloring_count(15, edges, cliques) == 1
    assert o.coloring_count(15, edges, cliques, both=d) == 0
    big = [c for c in cliques if len(c) == 4]
    # the oracle demands exactly one 1 per listed clique; smaller ones are covered by independence
    assert o.coloring_count(15, edges, big) == 73
    assert o.coloring_count(15, edges, big, both=d) == 0


def test_coloring_search_bound(g60):
    with pytest.raises(SearchBoundExceeded):
        verify_gadget_coloring(g60)


# --- rotations --------------------------------------------------------------------------

@given(vec4)
def test_rotations_are_orthogonal_and_isometric(v):
    quad = rotations(v)
    n = dot(v, v)
    for i in range(4):
        assert dot(quad[i], quad[i]) == n
        for j in range(i + 1, 4):
            assert not dot(quad[i], quad[j])


@given(vec4, vec4)
def test_rotations_preserve_inner_products(u, v):
    for ru, rv in zip(rotations(u), rotations(v)):
        assert dot(ru, rv) == dot(u, v)


def test_rotated_graph(g60):
    assert g60.n == 60
    assert len(g60.edges) == 474
    k = 4
    for j in range(15):
        quad = [g60.vectors[j + 15 * c] for c in range(4)]
        assert rank(quad) == 4
        assert all(g60.adjacent(j + 15 * a, j + 15 * b) for a in range(4) for b in range(a + 1, 4))
    assert g60.clique_number() == k


def test_rotation_failure_is_detected():
    bad = GadgetGraph([vec(1, 0, 0)], ["u"], (0, 0))
    with pytest.raises(OrthogonalityFailure):
        rotate_copies(bad)


# --- compiled Hardy test ----------------------------------------------------------------

def test_compiled_test_shape(test60):
    assert test60.n_inputs == 529
    assert test60.n_completed == 20
    assert len(test60.zero_pairs) == 660
    assert (test60.x_star, test60.y_star) == (16, 306)
    assert test60.expected == [(k, k) for k in range(4)]


def test_inputs_are_orthogonal_bases(test60):
    V = np.array([[float(c) for c in v] for v in test60.vectors])
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    for row in test60.inputs:
        B = V[list(row)]
        assert np.max(np.abs(B @ B.T - np.eye(4))) < 1e-12


def test_quantum_verification(test60):
    q = quantum_verify(test60)
    assert q.uniform and q.zeros_exact
    assert all(p == Fraction(1, 16) for row in q.block for p in row)
    assert q.h_global == 4.0 and q.h_local == 2.0
    assert q.max_zero_float < 1e-20


def test_float_behavior_is_a_behavior(test60):
    b = float_behavior(test60)
    assert b.table.shape == (529, 529, 4, 4)
    assert np.max(np.abs(b.table.sum(axis=(2, 3)) - 1)) < 1e-12
    assert b.signalling() < 1e-12


def test_exact_probability_simple():
    e = vec(1, 0, 0, 0)
    assert exact_probability(e, e) == QSqrt3(Fraction(1, 4))
    assert exact_probability(e, vec(0, 1, 0, 0)) == QSqrt3(0)
    assert exact_probability(vec(1, 1, 0, 0), vec(1, 0, 0, 0)) == QSqrt3(Fraction(1, 8))


def test_lhv_search_is_capped(test60):
    with pytest.raises(CapExceeded):
        lhv_search(test60)


def test_lhv_search_on_a_small_test(test60):
    """A two-input restriction is small enough to search; compare with a float-built count."""
    import itertools
    from dataclasses import replace

    sub = [test60.inputs[test60.x_star], test60.inputs[test60.y_star]]
    small = replace(test60, inputs=sub, x_star=0, y_star=1)
    hits = lhv_search(small, cap=10**6)
    V = np.array([[float(c) for c in v] for v in test60.vectors])
    orth = lambda u, v: abs(V[u] @ V[v]) < 1e-9
    count = 0
    for (a0, a1), (b0, b1) in itertools.product(itertools.product(range(4), repeat=2), repeat=2):
        if (a0, b1) not in small.expected:
            continue
        va, vb = (sub[0][a0], sub[1][a1]), (sub[0][b0], sub[1][b1])
        if not any(orth(u, v) for u in va for v in vb):
            count += 1
    assert hits == count


def test_json_round_trip(test60, tmp_path):
    q = quantum_verify(test60)
    p = write_test_json(test60, tmp_path / "t.json", q)
    back = read_test_json(p)
    assert back.vectors == test60.vectors
    assert back.inputs == test60.inputs
    assert back.zero_pairs == test60.zero_pairs
    assert (back.x_star, back.y_star) == (test60.x_star, test60.y_star)
    d = json.loads(p.read_text())
    assert d["verification"]["uniform_1_16"] is True
