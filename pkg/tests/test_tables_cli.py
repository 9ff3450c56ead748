import json
import math

import pytest

from becfiber.cli import main
from becfiber.tables import ScanTable, format_number, read_table


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def sample_table():
    t = ScanTable(["theta", "value", "found"], metadata={"sigma_bar": 50.0, "command": "demo"})
    t.add_row(0.0, 1 / 3, 1)
    t.add_row(0.05, math.nan, 0)
    t.add_error(0.1, "did not converge")
    t.notes.append("N=2: nothing found")
    return t


# -- tables -------------------------------------------------------------------


def test_format_number():
    assert format_number(3) == "3"
    assert format_number(True) == "1"
    assert format_number(1 / 3) == "0.333333333333"
    assert format_number(math.nan) == "nan"


def test_csv_deterministic():
    assert sample_table().to_csv() == sample_table().to_csv()
    assert sample_table().to_json() == sample_table().to_json()


def test_csv_round_trip(tmp_path):
    path = sample_table().write(tmp_path / "t.csv")
    back = read_table(path)
    assert back.columns == ["theta", "value", "found"]
    assert back.metadata == {"sigma_bar": 50.0, "command": "demo"}
    assert back.rows[0] == pytest.approx((0.0, 1 / 3, 1.0), rel=1e-12)
    assert math.isnan(back.rows[1][1])
    assert back.errors == [{"theta": 0.1, "message": "did not converge"}]
    assert back.notes == ["N=2: nothing found"]


def test_json_round_trip(tmp_path):
    path = sample_table().write(tmp_path / "t.json")
    raw = json.loads(path.read_text())
    assert set(raw) == {"config", "columns", "rows", "errors", "notes"}
    assert raw["rows"][1][1] is None
    back = read_table(path)
    assert back.rows[0] == (0.0, 1 / 3, 1)
    assert math.isnan(back.rows[1][1])


def test_row_length_checked():
    with pytest.raises(ValueError):
        ScanTable(["a", "b"]).add_row(1.0)


# -- CLI ----------------------------------------------------------------------


def test_xi(capsys):
    assert main(["xi"]) == 0
    out = capsys.readouterr().out
    assert "xi exact  = 0.665957819" in out


def test_xi0(capsys):
    assert main(["xi0"]) == 0
    out = capsys.readouterr().out
    assert "|xi0|^2   = 0.2498002" in out
    assert "closed form" in out


def test_xi_config_echo(in_tmp):
    assert main(["xi", "--sigma", "20", "--sigma-z", "40", "--out", "xi.json"]) == 0
    t = read_table(in_tmp / "xi.json")
    assert t.metadata["command"] == "xi"
    assert t.metadata["sigma_bar"] == 20.0
    assert t.metadata["w0_bar"] == pytest.approx(20 * math.sqrt(2))
    assert t.metadata["waist_defaulted"] is True
    assert t.metadata["tol_abs"] == 1e-12


def test_degrees_flag(in_tmp):
    assert main(["xi0", "--theta", "1", "--degrees", "--out", "deg.csv"]) == 0
    assert main(["xi0", "--theta", str(math.radians(1)), "--out", "rad.csv"]) == 0
    deg, rad = read_table(in_tmp / "deg.csv"), read_table(in_tmp / "rad.csv")
    assert deg.rows[0][0] == pytest.approx(1.0)
    assert deg.rows[0][3] == pytest.approx(rad.rows[0][3], rel=1e-10)


def test_wavelength_flag(in_tmp):
    lam = 0.78
    assert main(["xi", "--wavelength", str(lam), "--sigma", "1", "--sigma-z", "2", "--out", "a.json"]) == 0
    t = read_table(in_tmp / "a.json")
    assert t.metadata["sigma_bar"] == pytest.approx(2 * math.pi / lam)
    assert t.metadata["sigma_z_bar"] == pytest.approx(4 * math.pi / lam)


@pytest.mark.parametrize("argv", [
    ["xi", "--theta", "-0.1"],
    ["xi", "--sigma", "0"],
    ["xi", "--n", "0"],
    ["xi", "--n", "2.5"],
    ["xi", "--wavelength", "-1"],
    ["xi", "--tol-abs", "0"],
    ["scan-theta", "--theta-steps", "1"],
    ["scan-theta", "--theta-min", "0.2", "--theta-max", "0.1"],
    ["critical-angle", "--theta-max", "0"],
    ["optimize-waist", "--w-min", "5", "--w-max", "1"],
    ["epsilon", "--drive", "wave:1"],
    ["epsilon", "--steps", "0"],
    ["no-such-command"],
    ["xi", "--bogus"],
])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 1


def test_numerical_failure_exit_code(capsys):
    # An evaluation budget this small cannot meet the tolerance.
    assert main(["xi", "--sigma-z", "5000", "--tol-abs", "1e-300", "--tol-rel", "1e-300"]) == 2
    assert "numerical failure" in capsys.readouterr().err


def test_scan_theta_stdout_and_argmax(capsys):
    assert main(["scan-theta", "--theta-steps", "5"]) == 0
    out = capsys.readouterr().out
    assert "theta,xi0_sq,xi_over_n" in out
    assert "at theta = 0\n" in out


def test_scan_theta_elongated_argmax_positive(in_tmp):
    assert main(["scan-theta", "--sigma-z", "5000", "--n", "1", "--theta-steps", "101",
                 "--out", "s.csv"]) == 0
    t = read_table(in_tmp / "s.csv")
    vals = t.column("xi0_sq")
    assert t.column("theta")[vals.index(max(vals))] > 0
    assert t.metadata["command"] == "scan-theta"
    assert t.metadata["theta_steps"] == 101


def test_scan_theta_deterministic_bytes(in_tmp):
    for name in ("a.csv", "b.csv"):
        assert main(["scan-theta", "--theta-steps", "20", "--out", name, "--workers", "2"]) == 0
    assert (in_tmp / "a.csv").read_bytes() == (in_tmp / "b.csv").read_bytes()


def test_scan_theta_plot(in_tmp):
    assert main(["scan-theta", "--theta-steps", "20", "--out", "fig.csv", "--plot"]) == 0
    svg = (in_tmp / "fig.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg
    assert main(["scan-theta", "--theta-steps", "20", "--out", "again.csv", "--plot"]) == 0
    assert (in_tmp / "again.svg").read_text() == svg


def test_critical_angle(capsys):
    assert main(["critical-angle", "--n", "100"]) == 0
    assert "theta* = 0.0538" in capsys.readouterr().out
    assert main(["critical-angle", "--n", "2"]) == 0
    assert "dominates everywhere" in capsys.readouterr().out


def test_sweep_n(in_tmp):
    assert main(["sweep-n", "--n", "2,10,100", "--out", "n.json", "--plot"]) == 0
    t = read_table(in_tmp / "n.json")
    assert t.column("found") == [0, 1, 1]
    assert t.column("theta_star")[2] > t.column("theta_star")[1]
    assert t.metadata["n_values"] == [2, 10, 100]
    assert (in_tmp / "n.svg").exists()


def test_optimize_waist(capsys):
    assert main(["optimize-waist"]) == 0
    out = capsys.readouterr().out
    line = next(s for s in out.splitlines() if s.startswith("w0_bar / (sqrt(2) sigma_bar)"))
    assert float(line.split("=")[1]) == pytest.approx(1.0, abs=5e-3)


def test_epsilon(in_tmp, capsys):
    assert main(["epsilon", "--drive", "const:1", "--readout", "const:1", "--t-max", "2",
                 "--out", "e.csv", "--plot"]) == 0
    assert "final |eps|^2 = 4" in capsys.readouterr().out
    t = read_table(in_tmp / "e.csv")
    assert t.column("eps_re")[-1] == pytest.approx(-2.0, abs=1e-10)
    assert (in_tmp / "e.svg").exists()
    assert any("perturbative" in n for n in t.notes)


def test_selfcheck(capsys):
    assert main(["selfcheck"]) == 0
    assert "8/8 suites passed" in capsys.readouterr().out


def test_scan_theta_zero_row_matches_scalar_commands(in_tmp):
    assert main(["scan-theta", "--n", "10", "--theta-max", "0.06", "--theta-steps", "200", "--out", "s.csv"]) == 0
    assert main(["xi0", "--out", "x0.csv"]) == 0
    assert main(["xi", "--out", "x.csv"]) == 0
    scan = read_table(in_tmp / "s.csv")
    assert len(scan) == 200
    theta, xi0_sq, xi_over_n = scan.rows[0]
    assert theta == 0.0
    assert xi0_sq == read_table(in_tmp / "x0.csv").rows[0][3]
    assert xi_over_n == pytest.approx(read_table(in_tmp / "x.csv").rows[0][0] / 10, rel=1e-11)


def test_epsilon_constant_example(in_tmp):
    assert main(["epsilon", "--drive", "const:1", "--readout", "const:1", "--t-max", "2",
                 "--steps", "64", "--out", "e.json"]) == 0
    t = read_table(in_tmp / "e.json")
    assert t.column("abs2")[-1] == pytest.approx(4.0, abs=1e-8)


def test_epsilon_round_trip_as_sampled_input(in_tmp):
    # A written trace can drive another run through the file: envelope.
    assert main(["epsilon", "--t-max", "1", "--steps", "50", "--out", "a.json"]) == 0
    assert main(["epsilon", "--drive", "file:a.json", "--t-max", "1", "--steps", "50", "--out", "b.json"]) == 0
    a, b = read_table(in_tmp / "a.json"), read_table(in_tmp / "b.json")
    # The first two columns give a drive of -t^2/2; with a unit readout
    # eps(1) = int_0^1 t^3/2 dt = 1/8.
    assert b.column("eps_re")[-1] == pytest.approx(1 / 8, abs=1e-3)
    assert len(a) == len(b) == 51
