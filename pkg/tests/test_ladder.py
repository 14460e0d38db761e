import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardy_cert.errors import OutOfRange
from hardy_cert.ladder import (LadderParams, ladder_angles, ladder_behavior, ladder_born_behavior,
                               ladder_global_randomness, ladder_hardy_prob, ladder_optimal_t,
                               ladder_table, ladder_zeros, printed_hardy_expression)
from hardy_cert.tilted import quantum_max

import oracles as o


def test_params_validation():
    with pytest.raises(OutOfRange):
        LadderParams(0, 0.5)
    with pytest.raises(OutOfRange):
        LadderParams(2, 1.0)
    with pytest.raises(OutOfRange):
        LadderParams(1.5, 0.5)
    with pytest.raises(OutOfRange):
        ladder_optimal_t(0)


def test_zero_list():
    z = ladder_zeros(3)
    assert len(z) == 7
    assert (0, 0, 0, 0) in z and (0, 1, 3, 2) in z and (1, 0, 2, 3) in z


@pytest.mark.parametrize("N", range(1, 11))
@pytest.mark.parametrize("t", [0.2, 0.55, 0.9])
def test_normalization_and_zeros(N, t):
    tab = ladder_table(N, t)
    assert np.max(np.abs(tab.sum(axis=(2, 3)) - 1)) < 1e-12
    for a, b, x, y in ladder_zeros(N):
        assert abs(tab[x, y, a, b]) < 1e-12


@given(st.integers(1, 12), st.floats(0.05, 0.95))
def test_closed_form_matches_born_rule(N, t):
    assert np.max(np.abs(ladder_table(N, t) - ladder_born_behavior(N, t).table)) < 1e-12


@given(st.integers(1, 12), st.floats(0.05, 0.95))
def test_no_signalling(N, t):
    assert ladder_behavior(LadderParams(N, t)).signalling() < 1e-12


def test_angles_start():
    a = ladder_angles(3, 0.5)
    assert math.tan(a[0]) ** 2 == pytest.approx(0.5)


def test_printed_form_lacks_squares():
    r = ladder_hardy_prob(LadderParams(3, 0.6))
    assert not r.agree
    t, N = 0.6, 3
    assert r.value == pytest.approx(t * t / (1 + t * t) * ((1 - t ** (2 * N)) / (1 + t ** (2 * N + 1))) ** 2,
                                    abs=1e-14)
    assert r.printed == pytest.approx(printed_hardy_expression(N, t))


def test_n1_optimum_equals_tilted_maximum():
    t, v = ladder_optimal_t(1)
    assert v == pytest.approx(0.0901699, abs=1e-6)
    assert v == pytest.approx(quantum_max(0.0), abs=1e-9)
    assert v == pytest.approx(o.QMAX_0, abs=1e-9)


@pytest.mark.parametrize("N", [1, 2, 5, 13, 30])
def test_optimum_against_dense_table_scan(N):
    ts = np.linspace(1e-3, 1 - 1e-3, 4001)
    scan = max(ladder_table(N, t)[N, N, 0, 0] for t in ts)
    t_star, v = ladder_optimal_t(N)
    assert v >= scan - 1e-12
    assert v == pytest.approx(scan, abs=1e-6)
    assert ladder_table(N, t_star)[N, N, 0, 0] == pytest.approx(v, abs=1e-14)


def test_optimum_monotone_and_bounded():
    vals = [ladder_optimal_t(N)[1] for N in range(1, 31)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.5


def test_global_randomness_definition():
    N, t = 4, 0.7
    p = ladder_table(N, t)[N, 0]
    assert ladder_global_randomness(N, t) == pytest.approx(-math.log2(p.max()))
    assert 0 < ladder_global_randomness(100, 0.9) <= 2


def test_n1_reference_point():
    tab = ladder_table(1, 0.46)
    assert tab[1, 0, 0, 1] == 0
    assert tab[1, 1, 0, 0] == pytest.approx(0.09015, abs=5e-6)
    assert ladder_global_randomness(1, 0.46) < 2


def test_large_n_limit_at_fixed_t():
    t = 0.6
    assert ladder_table(200, t)[200, 200, 0, 0] == pytest.approx(t * t / (1 + t * t), abs=1e-12)


def test_parities_converge_together():
    gaps = []
    for N in (20, 80, 320):
        t = 1 - N ** -0.5
        gaps.append(abs(ladder_global_randomness(N, t) - ladder_global_randomness(N + 1, t)))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.01


def test_normalization_at_random_points():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        N = int(rng.integers(1, 40))
        t = float(rng.uniform(0.01, 0.99))
        x, y = rng.integers(0, N + 1, size=2)
        assert abs(ladder_table(N, t)[x, y].sum() - 1) < 1e-12


@pytest.mark.parametrize("N", range(1, 11))
def test_born_rule_on_t_grid(N):
    for t in np.linspace(0.02, 0.98, 50):
        born = ladder_born_behavior(N, t).table[N, N, 0, 0]
        assert ladder_table(N, t)[N, N, 0, 0] == pytest.approx(born, abs=1e-9)
