import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardy_cert.behavior import evaluate
from hardy_cert.errors import OutOfRange, SingularW
from hardy_cert.iw import (eigen_equation, eigen_equation_diagonal, iw_classical,
                           iw_classical_enumerated, iw_functional, iw_operator, iw_quantum,
                           iw_quantum_kkt, iw_quantum_numeric, optimal_behavior,
                           top_eigenvalue)

import oracles as o

GRID = np.linspace(-0.245, 0.98, 50)
GRID = GRID[np.abs(GRID) > 1e-3]


@pytest.mark.parametrize("w, expected", [(0.0, 2.0), (0.44, 3.32), (-0.2, 2.2)])
def test_classical_values(w, expected):
    assert iw_classical(w) == pytest.approx(expected, abs=1e-12)


def test_classical_closed_form_equals_enumeration():
    rng = np.random.default_rng(7)
    for w in rng.uniform(-0.2499, 0.9999, 50):
        assert iw_classical(w) == iw_classical_enumerated(w) or \
            abs(iw_classical(w) - iw_classical_enumerated(w)) < 1e-12


def test_out_of_range():
    with pytest.raises(OutOfRange):
        iw_classical(2)
    with pytest.raises(OutOfRange):
        iw_quantum_kkt(-0.3)


def test_singular_w():
    with pytest.raises(SingularW):
        iw_quantum_kkt(1e-5)


def test_kkt_equals_numeric_on_grid():
    worst = 0.0
    for w in GRID:
        worst = max(worst, abs(iw_quantum_kkt(w).lambda_max - iw_quantum_numeric(w).lambda_max))
    assert worst < 1e-8


@pytest.mark.parametrize("w", [-0.2, -0.1, 0.2, 0.44, 0.9])
def test_quantum_against_brute_force_oracle(w):
    corr, ma, mb = o.iw_coefficients(w)
    assert iw_quantum(w) == pytest.approx(o.bell_operator_max(corr, ma, mb), abs=1e-7)


def test_chsh_limit():
    assert iw_quantum_numeric(1e-9).lambda_max == pytest.approx(2 * math.sqrt(2), abs=1e-6)


def test_corner_eigenvalues():
    for w in (-0.2, 0.3, 0.7):
        ev = np.linalg.eigvalsh(iw_operator(w, math.pi, math.pi))
        for target in (-w + 2, -w - 2, w + 2 * (1 - w)):
            assert np.min(np.abs(ev - target)) < 1e-12


@given(st.floats(-0.2499, 0.999), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
def test_eigen_equation_vanishes_on_spectrum(w, a, b):
    for lam in np.linalg.eigvalsh(iw_operator(w, a, b)):
        assert abs(eigen_equation(lam, w, a, b)) < 1e-9


@given(st.floats(-0.2499, 0.999), st.floats(-math.pi, math.pi))
def test_diagonal_equation(w, a):
    lam = top_eigenvalue(w, a, a)
    assert abs(eigen_equation_diagonal(lam, w, a)) < 1e-9


@given(st.floats(-0.2499, 0.999).filter(lambda w: abs(w) > 1e-3))
def test_quantum_exceeds_classical(w):
    assert iw_quantum(w) > iw_classical(w)


def test_winning_candidate_and_stated_rule():
    pos = iw_quantum_kkt(0.44)
    assert pos.candidate_index == 4 and pos.stated_rule_agrees
    neg = iw_quantum_kkt(-0.2)
    # the fifth stationary value is not an eigenvalue of the operator for w < 0
    assert neg.stated_rule_index == 5 and not neg.stated_rule_agrees
    assert neg.candidates[4].lam > iw_quantum_numeric(-0.2).lambda_max + 0.1
    assert neg.lambda_max == pytest.approx(iw_quantum_numeric(-0.2).lambda_max, abs=1e-9)


def test_optimum_is_symmetric_and_realized():
    for w in (-0.2, 0.44, 0.95):
        num = iw_quantum_numeric(w)
        assert abs(num.alpha1 - num.beta1) < 1e-8
        b = optimal_behavior(w, num.alpha1, num.beta1)
        assert evaluate(iw_functional(w), b) == pytest.approx(num.lambda_max, abs=1e-10)
