"""The reference routines reproduce their own frozen constants and the known closed forms."""

import math

import mpmath as mp
import pytest

import oracles as o


def test_quantum_max_at_zero_matches_closed_form():
    assert float(o.quantum_max(0)) == pytest.approx(float((5 * mp.sqrt(5) - 11) / 2), abs=1e-15)
    assert float(o.quantum_max(0)) == pytest.approx(o.QMAX_0, abs=1e-15)


def test_optimal_theta_at_zero():
    assert float(o.optimal_theta(0)) == pytest.approx(o.THETA_0, abs=1e-14)
    assert float(mp.sin(o.optimal_theta(0))) == pytest.approx(3 - math.sqrt(5), abs=1e-14)


def test_breakpoints_frozen():
    assert float(o.breakpoint((0, 0, 1, 0), (0, 0, 1, 1), -0.155)) == pytest.approx(o.W0, abs=1e-15)
    assert float(o.breakpoint((0, 0, 1, 1), (1, 1, 1, 0), -0.105)) == pytest.approx(o.W1, abs=1e-15)


def test_h_global_at_w0_frozen():
    p = o.entry(o.W0, (0, 0, 1, 1))
    assert -math.log2(float(p)) == pytest.approx(o.H_GLOBAL_W0, abs=1e-12)
    assert float(o.quantum_max(o.W0)) == pytest.approx(o.QMAX_W0, abs=1e-15)


def test_oracle_zeros_hold():
    t = o.hardy_table(mp.mpf("0.7"))
    for a, b, x, y in o.HARDY_ZEROS:
        assert abs(t[x][y][a][b]) < mp.mpf(10) ** -35


def test_brute_force_chsh():
    corr, ma, mb = o.iw_coefficients(0.0)
    assert o.bell_operator_max(corr, ma, mb, restarts=10) == pytest.approx(o.CHSH_Q, abs=1e-9)
