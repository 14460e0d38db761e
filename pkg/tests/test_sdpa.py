import math

import numpy as np
import pytest

from hardy_cert.iw import iw_functional, iw_quantum
from hardy_cert.npa.moment import NpaScenario, build_npa2
from hardy_cert.npa.programs import bell_problem, guess_problem
from hardy_cert.npa.sdpa import export_sdpa, format_sdpa, parse_sdpa, read_sdpa, solve_sdpa, to_sdpa
from hardy_cert.npa.solve import solve


def _same(d1, d2):
    assert d1.block_struct == d2.block_struct
    assert np.array_equal(d1.c, d2.c)
    for m1, m2 in zip(d1.mats, d2.mats):
        for b1, b2 in zip(m1, m2):
            assert np.array_equal(b1, b2)
    assert d1.comments == d2.comments


@pytest.mark.parametrize("make", [
    lambda: bell_problem(iw_functional(0.44)),
    lambda: guess_problem(0.44, 3.4, (1, 1)),
])
def test_round_trip_is_bit_exact(make, tmp_path):
    p = make()
    data = export_sdpa(p, tmp_path / "p.dat-s")
    back = read_sdpa(tmp_path / "p.dat-s")
    _same(data, back)
    assert format_sdpa(back) == (tmp_path / "p.dat-s").read_text()


def test_export_is_deterministic():
    a = format_sdpa(to_sdpa(guess_problem(0.0, 2.7, (1, 1))))
    b = format_sdpa(to_sdpa(guess_problem(0.0, 2.7, (1, 1))))
    assert a == b


def test_header():
    data = to_sdpa(bell_problem(iw_functional(0.0)))
    assert data.header_value("sense") == "max"
    assert data.block_struct == [13]
    assert data.m == build_npa2(NpaScenario.bipartite()).n_moments - 1


def test_chsh_via_exported_file(tmp_path):
    export_sdpa(bell_problem(iw_functional(0.0)), tmp_path / "chsh.dat-s")
    v = solve_sdpa(read_sdpa(tmp_path / "chsh.dat-s"), solver="CVXOPT")
    assert v == pytest.approx(2 * math.sqrt(2), abs=1e-6)


def test_guess_program_agrees_across_routes():
    # close to the quantum bound the guess curve is steep and both solvers lose
    # digits; 0.02 below it the direct solve certifies a gap of ~1e-8
    p = guess_problem(0.44, iw_quantum(0.44) - 0.02, (1, 1))
    direct = solve(p)
    assert direct.status == "optimal"
    via_file = solve_sdpa(parse_sdpa(format_sdpa(to_sdpa(p))))
    assert via_file == pytest.approx(direct.value, abs=1e-5)


def test_empty_objective_is_zero():
    p = build_npa2(NpaScenario.bipartite())
    assert solve_sdpa(to_sdpa(p)) == pytest.approx(0.0, abs=1e-9)


def test_parser_accepts_braced_block_struct():
    text = '"sense=min\n1\n1\n{1}\n1.0\n0 1 1 1 1.0\n1 1 1 1 1.0\n'
    d = parse_sdpa(text)
    assert d.block_struct == [1]
    # x - 1 >= 0, minimize x
    assert solve_sdpa(d, solver="CLARABEL") == pytest.approx(1.0, abs=1e-7)
