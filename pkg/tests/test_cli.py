import re

import numpy as np
import pytest

from dykstra_msf import sets
from dykstra_msf.cli import EXIT_INPUT, EXIT_OK, EXIT_SOLVER, main
from dykstra_msf.errors import ProjectionError
from dykstra_msf.problems import bundled_dir, bundled_problems, load_problem, load_solution

DATA = bundled_dir()


def _vec(line):
    return np.array([float(e) for e in line.split("[", 1)[1].rstrip("]").split(",")])


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def _field(out, name):
    m = re.search(rf"^{re.escape(name)} = (\S+)", out, re.M)
    assert m, f"{name} not in output:\n{out}"
    return m.group(1)


# --- solve -----------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["tight_p1.5.json", "tight_p2.json"])
def test_solve_tight_file_defaults(capsys, name):
    code, out, _ = _run(capsys, "solve", DATA / name)
    assert code == EXIT_OK
    x = _vec(out.splitlines()[0])
    assert np.max(np.abs(x - [1.0, 0.0])) <= 1e-6
    assert "termination = " in out


def test_solve_feasible_anchor_file(capsys):
    code, out, _ = _run(capsys, "solve", DATA / "feasible_anchor.json")
    assert code == EXIT_OK
    v = load_problem(DATA / "feasible_anchor.json").anchor
    np.testing.assert_array_equal(_vec(out.splitlines()[0]), v)
    assert "termination = step_tol after 1 sweeps" in out


def test_solve_malformed_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"v": [1.0, 2.0],\n "blocks": [{"A": [[1.0, 0.0]], "set": {"type": "halfspace", "a": [1.0], "b": "x"}}]}\n')
    code, _, err = _run(capsys, "solve", bad)
    assert code == EXIT_INPUT
    assert "blocks[0].set.b" in err
    assert "line 2" in err


def test_solve_missing_file(capsys, tmp_path):
    code, _, err = _run(capsys, "solve", tmp_path / "none.json")
    assert code == EXIT_INPUT
    assert "cannot read" in err


def test_solve_bad_flag_values(capsys):
    code, _, _ = _run(capsys, "solve", DATA / "tight_p2.json", "--max-sweeps", "0")
    assert code == EXIT_INPUT
    with pytest.raises(SystemExit) as info:
        main(["solve", str(DATA / "tight_p2.json"), "--max-sweeps", "many"])
    assert info.value.code == EXIT_INPUT


def test_solve_projection_failure_exits_3(capsys, monkeypatch):
    def boom(self, u):
        raise ProjectionError("forced", 1.0)

    monkeypatch.setattr(sets.PNormBall, "project", boom)
    code, _, err = _run(capsys, "solve", DATA / "tight_p1.5.json")
    assert code == EXIT_SOLVER
    assert "forced" in err


def test_solve_writes_history(capsys, tmp_path):
    out_csv = tmp_path / "h.csv"
    code, _, _ = _run(capsys, "solve", DATA / "polyhedral_1.json", "--history-out", out_csv,
                      "--dstar", load_solution(DATA / "polyhedral_1.json")["d_star"], "--emit-x",
                      "--record-every", "3")
    assert code == EXIT_OK
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "sweep,d_value,step_norm,residual_norm,gap,dist_argmin,x_0,x_1"
    assert [ln.split(",")[0] for ln in lines[1:4]] == ["0", "3", "6"]


@pytest.mark.parametrize("name", bundled_problems())
def test_round_trip_bundled_files(capsys, tmp_path, name):
    h = tmp_path / "h.csv"
    sol = load_solution(DATA / name)
    extra = ["--dstar", sol["d_star"]] if sol else []
    assert _run(capsys, "solve", DATA / name, "--history-out", h, "--max-sweeps", 2000, *extra)[0] == EXIT_OK
    code, out, _ = _run(capsys, "rates", h)
    assert code == EXIT_OK
    if sol is not None:
        x = _vec(_run(capsys, "solve", DATA / name)[1].splitlines()[0])
        assert np.max(np.abs(x - sol["x_star"])) <= 1e-6


def test_history_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        _run(capsys, "solve", DATA / "polyhedral_2.json", "--history-out", path, "--emit-x")
    assert a.read_bytes() == b.read_bytes()


# --- reproduce ------------------------------------------------------------------------------


def test_reproduce_tight(capsys):
    code, out, _ = _run(capsys, "reproduce", "tight", "--p", "1.5")
    assert code == EXIT_OK
    assert float(_field(out, "gap exponent along path")) == pytest.approx(3.0, abs=0.05)
    assert float(_field(out, "dist exponent along path")) == pytest.approx(1.0, abs=1e-6)


def test_reproduce_tight_p2_writes_history(capsys, tmp_path):
    h = tmp_path / "t.csv"
    code, out, _ = _run(capsys, "reproduce", "tight", "--p", "2", "--out", h)
    assert code == EXIT_OK
    assert float(_field(out, "gap exponent along path")) == pytest.approx(2.0, abs=0.05)
    assert h.read_text().startswith("sweep,")


@pytest.mark.parametrize("p", ["3", "1", "0.5"])
def test_reproduce_tight_out_of_range(capsys, p):
    code, _, err = _run(capsys, "reproduce", "tight", "--p", p)
    assert code == EXIT_INPUT
    assert "(1, 2]" in err


def test_reproduce_nonlinear_full(capsys):
    code, out, _ = _run(capsys, "reproduce", "nonlinear", "--sweeps", "100000")
    assert code == EXIT_OK
    assert float(_field(out, "max iterate deviation from recurrence (t <= 10000)")) <= 1e-10
    assert float(_field(out, "dist^2 power-law exponent")) == pytest.approx(-1.0, abs=0.05)
    assert float(_field(out, "gap linear-fit ratio over tail")) >= 0.999


def test_reproduce_nonlinear_too_short(capsys):
    code, _, _ = _run(capsys, "reproduce", "nonlinear", "--sweeps", "50")
    assert code == EXIT_INPUT


# --- rates ---------------------------------------------------------------------------------------


HEADER = "sweep,d_value,step_norm,residual_norm,gap,dist_argmin\n"


def test_rates_polyhedral_history(capsys, tmp_path):
    h = tmp_path / "h.csv"
    d_star = load_solution(DATA / "polyhedral_3.json")["d_star"]
    _run(capsys, "solve", DATA / "polyhedral_3.json", "--history-out", h, "--dstar", d_star,
         "--step-tol", "0", "--residual-tol", "0", "--max-sweeps", "2000")
    code, out, _ = _run(capsys, "rates", h, "--mode", "linear")
    assert code == EXIT_OK
    assert _field(out, "column") == "gap"
    assert float(_field(out, "ratio")) < 1.0


def test_rates_synthetic_geometric(capsys, tmp_path):
    h = tmp_path / "g.csv"
    rows = "".join(f"{t},{-1 + 0.5**t!r},1,1,{0.5**t!r},\n" for t in range(40))
    h.write_text(HEADER + rows)
    out_csv = tmp_path / "r.csv"
    code, out, _ = _run(capsys, "rates", h, "--out", out_csv)
    assert code == EXIT_OK
    assert float(_field(out, "ratio")) == pytest.approx(0.5, abs=1e-12)
    row = out_csv.read_text().splitlines()[1].split(",")
    assert row[0] == "linear"
    assert float(row[1]) == pytest.approx(0.5, abs=1e-12)


def test_rates_power_law_column(capsys, tmp_path):
    h = tmp_path / "p.csv"
    rows = "".join(f"{t},0,{1 / (t + 1)!r},1,,\n" for t in range(200))
    h.write_text(HEADER + rows)
    code, out, _ = _run(capsys, "rates", h, "--mode", "power_law", "--skip", "10")
    assert code == EXIT_OK
    assert _field(out, "column") == "step_norm"
    assert float(_field(out, "exponent")) == pytest.approx(-1.0, abs=1e-9)
    assert _field(out, "window") == "10..199"


@pytest.mark.parametrize("text", ["", "a,b,c\n1,2,3\n", HEADER])
def test_rates_schema_errors(capsys, tmp_path, text):
    h = tmp_path / "bad.csv"
    h.write_text(text)
    code, _, err = _run(capsys, "rates", h)
    assert code == EXIT_INPUT
    assert err.startswith("error:")


def test_rates_short_series_reports_unavailable(capsys, tmp_path):
    h = tmp_path / "s.csv"
    h.write_text(HEADER + "0,0,0,0,,\n")
    code, out, _ = _run(capsys, "rates", h)
    assert code == EXIT_OK
    assert "fit unavailable" in out


def test_no_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == EXIT_INPUT
