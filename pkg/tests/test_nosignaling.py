import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from hardy_cert.behavior import Behavior, evaluate
from hardy_cert.errors import Infeasible, NotNormalized, OutOfRange
from hardy_cert.nosignaling import (SeedBounds, hardy_level_bound, hardy_level_from_mdl,
                                    input_distribution_vertices, joint_distribution,
                                    mdl_local_max, mdl_value, ns_analytic_bound, ns_hardy_range,
                                    ns_lp_max_prob, ns_lp_mdl_max_prob, ns_vertices, pr_boxes,
                                    sv_to_lh, tilde_mdl_functional, tilde_mdl_threshold,
                                    validate_lp_grid)
from hardy_cert.tilted import behavior_of, canonical_strategy, i_hardy_functional, quantum_max

UNIFORM = SeedBounds(0.25, 0.25)
TARGETS = [(a, b, x, y) for x in range(2) for y in range(2) for a in range(2) for b in range(2)]


def test_sv_to_lh():
    b = sv_to_lh(0.1)
    assert (b.l, b.h) == pytest.approx((0.16, 0.36), abs=1e-15)
    assert (sv_to_lh(0.0).l, sv_to_lh(0.0).h) == (0.25, 0.25)
    with pytest.raises(OutOfRange):
        sv_to_lh(0.5)


def test_seed_bounds_validation():
    with pytest.raises(OutOfRange):
        SeedBounds(0.3, 0.2)
    with pytest.raises(OutOfRange):
        SeedBounds(0.0, 0.5)


def test_mdl_value_at_uniform_seed():
    p = behavior_of(canonical_strategy(0.0))
    j = joint_distribution(p, [0.25] * 4)
    assert mdl_value(j, 0.0, UNIFORM) == pytest.approx(0.005636, abs=5e-7)
    assert mdl_value(j, 0.0, UNIFORM) == pytest.approx(quantum_max(0.0) / 16, abs=1e-12)


def test_mdl_value_rejects_unnormalized():
    with pytest.raises(NotNormalized):
        mdl_value(np.full((2, 2, 2, 2), 0.1), 0.0, UNIFORM)


@pytest.mark.parametrize("w", [-0.2, 0.0, 0.3, 0.9])
@pytest.mark.parametrize("eps", [0.0, 0.05, 0.2])
def test_local_max_is_zero(w, eps):
    assert mdl_local_max(w, sv_to_lh(eps)) == pytest.approx(0.0, abs=1e-12)


@given(st.floats(0.01, 0.25), st.floats(0.0, 1.0))
def test_input_vertices_are_feasible(l, t):
    h = min(0.99, l + t * (1 - 4 * l) + 1e-3)
    assume(3 * l + h <= 1 + 1e-12 and l + 3 * h >= 1 - 1e-12)
    verts = input_distribution_vertices(SeedBounds(l, h))
    assert verts
    for q in verts:
        assert q.sum() == pytest.approx(1, abs=1e-12)
        assert np.all(q >= l - 1e-12) and np.all(q <= h + 1e-12)


def test_tilde_threshold_examples():
    # at w = 0 the uniform-seed local edge (tilde = 0) maps to the classical CHSH-type value
    assert tilde_mdl_threshold(0.0, 0.0, UNIFORM) == pytest.approx(2.0)
    assert tilde_mdl_threshold(0.0, 0.44, UNIFORM) == pytest.approx(3.32)
    # linear with slope 4 / (l h)
    b = sv_to_lh(0.1)
    d = tilde_mdl_threshold(0.01, 0.2, b) - tilde_mdl_threshold(0.0, 0.2, b)
    assert d == pytest.approx(0.04 / (b.l * b.h))


def test_tilde_functional_weights():
    b = sv_to_lh(0.1)
    f = tilde_mdl_functional(0.3, b)
    p = behavior_of(canonical_strategy(0.3))
    expected = b.l**2 * (p(0, 0, 0, 0) + 0.3 * p(1, 1, 0, 0) - 0.3) \
        - b.h**2 * (p(0, 1, 0, 1) + p(1, 0, 1, 0) + p(0, 0, 1, 1))
    assert evaluate(f, p) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("w, delta, bounds, expected", [
    (0.0, 0.005636, UNIFORM, 1 - 0.005636 * 16),
    (-0.2, 0.004, UNIFORM, 1 - 0.064 / 0.8),
    (0.5, 0.04, UNIFORM, 1 - (0.64 - 0.5) / 0.5),
    (0.0, 0.0, sv_to_lh(0.1), 1.0),
    (0.0, 1.0, sv_to_lh(0.1), 0.0),
])
def test_analytic_bound_examples(w, delta, bounds, expected):
    assert ns_analytic_bound(w, delta, bounds) == pytest.approx(expected, abs=1e-12)


@given(st.floats(-0.2499, 0.999), st.floats(0, 0.02), st.floats(0, 0.3))
def test_analytic_bound_factors_through_hardy_level(w, delta, eps):
    b = sv_to_lh(eps)
    v = hardy_level_from_mdl(w, delta, b)
    assert ns_analytic_bound(w, delta, b) == pytest.approx(
        min(1.0, max(0.0, hardy_level_bound(w, v))), abs=1e-12)


def test_negative_delta_rejected():
    with pytest.raises(OutOfRange):
        ns_analytic_bound(0.0, -1e-3, UNIFORM)


def test_pr_boxes():
    boxes = pr_boxes()
    assert len(boxes) == 8
    assert len(ns_vertices()) == 24
    for b in boxes:
        assert b.signalling() < 1e-15
        assert np.all(b.marginal_a() == 0.5)
    chsh = lambda p: sum((-1) ** (x * y) * (p(0, 0, x, y) + p(1, 1, x, y) - p(0, 1, x, y) - p(1, 0, x, y))
                         for x in range(2) for y in range(2))
    assert max(chsh(b) for b in boxes) == pytest.approx(4.0)


@pytest.mark.parametrize("w", [-0.2, 0.0, 0.5])
def test_hardy_range_lp_matches_vertices(w):
    f = i_hardy_functional(w)
    vals = [evaluate(f, v) for v in ns_vertices()]
    lo, hi = ns_hardy_range(w)
    assert hi == pytest.approx(max(vals), abs=1e-9)
    assert lo == pytest.approx(min(vals), abs=1e-9)


def test_lp_grid_has_no_violations():
    rep = validate_lp_grid(np.linspace(-0.24, 0.95, 7), n_values=12)
    assert rep.points == 7 * 12 * 16
    assert rep.violations == 0 and rep.max_excess <= 1e-9
    assert rep.lower_violations == 0


@pytest.mark.parametrize("w", [-0.2, 0.0, 0.4])
def test_lp_attains_the_cap(w):
    _, hi = ns_hardy_range(w)
    v = 0.5 * hi
    best = max(ns_lp_max_prob(w, v, t) for t in TARGETS)
    assert best == pytest.approx(hardy_level_bound(w, v), abs=1e-9)


@pytest.mark.parametrize("w, delta, eps", [(0.0, 0.004, 0.0), (-0.1, 0.002, 0.05), (0.3, 0.01, 0.1)])
def test_mdl_lp_matches_analytic(w, delta, eps):
    b = sv_to_lh(eps)
    lp = max(ns_lp_mdl_max_prob(w, delta, b, t) for t in TARGETS)
    assert lp == pytest.approx(ns_analytic_bound(w, delta, b), abs=1e-9)


def test_lp_infeasible_above_range():
    _, hi = ns_hardy_range(0.0)
    with pytest.raises(Infeasible):
        ns_lp_max_prob(0.0, hi + 0.1, (0, 0, 0, 0))


@given(st.lists(st.floats(0, 1), min_size=24, max_size=24), st.floats(0, 0.6),
       st.floats(-0.2499, 0.999))
def test_random_ns_boxes_respect_cap(weights, s, w):
    # noise mixed into the best vertex keeps most samples at a nonnegative level
    f = i_hardy_functional(w)
    verts = ns_vertices()
    top = max(verts, key=lambda v: evaluate(f, v))
    wts = np.array(weights)
    assume(wts.sum() > 1e-6)
    wts /= wts.sum()
    t = (1 - s) * top.table + s * sum(c * v.table for c, v in zip(wts, verts))
    p = Behavior(t)
    v = evaluate(f, p)
    assume(v >= 0)
    assert t.max() <= hardy_level_bound(w, v) + 1e-9
