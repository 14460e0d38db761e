import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardy_cert import cli
from hardy_cert.report import (SCHEMA_VERSION, RunConfig, fig2_l_grid, format_csv, format_json,
                               parse_csv, parse_json, read_csv, reproduce_figures, summary_rows)

CFG = RunConfig("test", {"w": 0.44}, tolerances={"gap": 1e-7}, seed=3)

cell = st.one_of(st.integers(-10**6, 10**6), st.booleans(),
                 st.floats(allow_nan=False, allow_infinity=False),
                 st.text(alphabet="abcxyz_-", min_size=1, max_size=8))


@given(st.lists(st.lists(cell, min_size=3, max_size=3), max_size=6))
def test_csv_round_trip(rows):
    text = format_csv(CFG, ["a", "b", "c"], rows)
    t = parse_csv(text)
    assert t.schema_version == SCHEMA_VERSION
    assert t.config == CFG
    assert t.columns == ["a", "b", "c"]
    assert len(t.rows) == len(rows)
    for got, want in zip(t.rows, rows):
        for g, w in zip(got, want):
            if isinstance(w, float):
                assert g == w  # repr round-trips exactly
            elif isinstance(w, bool):
                assert g is w
            elif isinstance(w, int):
                assert g == w
            else:
                assert str(g) == w or g == _num(w)


def _num(s):
    try:
        return float(s)
    except ValueError:
        return s


def test_csv_header_and_negative_zero():
    text = format_csv(CFG, ["x"], [[-0.0], [1.5]])
    lines = text.splitlines()
    assert lines[0] == f"# schema_version={SCHEMA_VERSION}"
    assert lines[1].startswith("# config={")
    assert lines[3] == "0.0"


def test_csv_rejects_ragged_rows_and_bad_version():
    with pytest.raises(ValueError):
        format_csv(CFG, ["a", "b"], [[1]])
    bad = format_csv(CFG, ["a"], [[1]]).replace("schema_version=1", "schema_version=99")
    with pytest.raises(ValueError):
        parse_csv(bad)
    with pytest.raises(ValueError):
        parse_csv("a,b\n1,2\n")


def test_json_round_trip():
    res = {"x": np.float64(1.25), "arr": np.arange(3), "flag": np.bool_(True), "inf": math.inf}
    cfg, out = parse_json(format_json(CFG, res))
    assert cfg == CFG
    assert out == {"x": 1.25, "arr": [0, 1, 2], "flag": True, "inf": "inf"}


def test_config_is_canonical():
    a = RunConfig("c", {"b": 1, "a": 2})
    b = RunConfig("c", {"a": 2, "b": 1})
    assert a.to_json() == b.to_json()
    assert RunConfig.from_json(a.to_json()) == a


def test_l_grid():
    ls = fig2_l_grid(20)
    assert len(ls) == 20 and ls[-1] == 0.25 and ls[0] > 0


def test_summary_rows_deviations():
    rows = {r[0]: r for r in summary_rows()}
    assert rows["quantum_max(0)"][3] < 1e-7
    assert rows["w0"][3] < 5e-5 and rows["w1"][3] < 5e-5
    assert rows["ladder_opt(N=1)"][3] < 1e-6
    assert rows["H_max_I_0.44"][3] < 0.01
    for r in rows.values():
        assert r[3] == pytest.approx(abs(r[2] - r[1]))


def test_reproduce_figures_is_deterministic(tmp_path):
    a = reproduce_figures(tmp_path / "a", CFG, steps=4, fig1_points=3, plots=False)
    b = reproduce_figures(tmp_path / "b", CFG, steps=4, fig1_points=3, plots=False)
    for k in ("fig1", "fig2", "summary"):
        assert a[k].read_bytes() == b[k].read_bytes()
    t = read_csv(a["fig2"])
    assert t.columns == ["l", "h_sum_w0", "h_sum_w0.44", "h_third_w0", "h_third_w0.44"]
    assert len(t.rows) == 4
    f1 = read_csv(a["fig1"])
    assert f1.column("guess_prob")[0] == pytest.approx(1.0, abs=1e-6)


def test_reproduce_figures_renders_plots(tmp_path):
    out = reproduce_figures(tmp_path, CFG, steps=3, fig1_points=3, plots=True)
    for k in ("fig1_png", "fig2_png"):
        data = out[k].read_bytes()
        assert data[:8] == b"\x89PNG\r\n\x1a\n"


# --- CLI -----------------------------------------------------------------------------

def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_tilted(capsys):
    code, out, _ = run(["tilted", "--w", "0", "--json"], capsys)
    assert code == 0
    cfg, res = parse_json(out)
    assert cfg.command == "tilted"
    assert res["quantum_max"] == pytest.approx(0.0901699, abs=1e-7)


def test_cli_domain_error_exits_2(capsys):
    code, out, err = run(["iw", "--w", "2"], capsys)
    assert code == 2 and out == ""
    e = json.loads(err)
    assert e["error"] == "OutOfRange" and e["command"] == "iw"


def test_cli_tilted_out_of_range(capsys):
    code, _, err = run(["tilted", "--w", "-0.3"], capsys)
    assert code == 2 and json.loads(err)["error"] == "OutOfRange"


def test_cli_bad_setting_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["npa-guess", "--w", "0", "--iw", "2.5", "--setting", "2,0"])
    assert exc.value.code == 2


def test_cli_npa_guess_infeasible(capsys):
    code, _, err = run(["npa-guess", "--w", "0.44", "--iw", "3.6"], capsys)
    assert code == 2 and json.loads(err)["error"] == "Infeasible"


def test_cli_iw_and_ladder(capsys):
    code, out, _ = run(["iw", "--w", "0.44"], capsys)
    _, res = parse_json(out)
    assert res["classical"] == pytest.approx(3.32)
    assert res["quantum_kkt"] == pytest.approx(res["quantum_numeric"], abs=1e-8)
    code, out, _ = run(["ladder", "--n", "1"], capsys)
    _, res = parse_json(out)
    assert res["p_hardy"] == pytest.approx(0.0901699, abs=1e-6)


def test_cli_ns_bound_lp_verify(capsys):
    code, out, _ = run(["ns-bound", "--w", "0", "--delta", "0.004", "--l", "0.25", "--h", "0.25",
                        "--lp-verify"], capsys)
    t = parse_csv(out)
    assert len(t.rows) == 16 and all(t.column("within_bound"))
    assert max(t.column("lp_max")) == pytest.approx(t.rows[0][5], abs=1e-9)


def test_cli_mdl_curve_writes_rows_and_sdpa(tmp_path, capsys):
    stem = tmp_path / "mdl.dat-s"
    code, _, _ = run(["mdl-curve", "--w", "0.44", "--steps", "20", "--export-sdpa", str(stem),
                      "--out", str(tmp_path / "mdl.csv")], capsys)
    assert code == 0
    t = read_csv(tmp_path / "mdl.csv")
    assert len(t.rows) == 20
    assert t.config.args["w"] == 0.44
    assert len(list(tmp_path.glob("mdl-*.dat-s"))) == 20


def test_cli_gadget_emits_test(tmp_path, capsys):
    code, out, _ = run(["gadget", "--verify", "--emit-test", str(tmp_path / "t.json")], capsys)
    _, res = parse_json(out)
    assert res["coloring"]["certified"] and res["uniform_1_16"]
    assert (res["x_star"], res["y_star"]) == (16, 306)
    assert (tmp_path / "t.json").exists()


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "hardy_cert.cli", "ladder", "--n", "2"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["result"]["N"] == 2
