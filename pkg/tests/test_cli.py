import csv
import io
import json
import math

import pytest

from cmaf import cli


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def table(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [[float(x) for x in r] for r in rows[1:]]


def test_background_examples():
    code, out, _ = run("background", "--s", "1", "--sbar", "0")
    assert code == 0
    cols, rows = table(out)
    rec = dict(zip(cols, rows[0]))
    assert (rec["r"], rec["omega_sq"], rec["omegabar"], rec["rho"]) == (2.0, 1.0, 0.0, -0.125)
    _, rows = table(run("background", "--s", "0", "--sbar", "0.3")[1])
    assert rows[0][cols.index("r")] == 1.0


@pytest.mark.parametrize("argv", [
    ("background", "--s", "-2"),
    ("evolve", "--case", "iii", "--l", "1"),
    ("evolve", "--case", "i"),
    ("evolve", "--case", "i", "--l", "-1"),
    ("evolve", "--case", "i", "--l", "2", "--n-steps", "3"),
    ("spectrum", "--l-max", "0"),
    ("bondi", "--r0", "-1"),
    ("frobnicate",),
])
def test_bad_input_exits_2(argv):
    code, out, err = run(*argv)
    assert code == 2 and out == ""
    assert err


def test_evolve_examples():
    cols, rows = table(run("evolve", "--case", "i", "--l", "1", "--u-max", "1")[1])
    f = cols.index("delta_f")
    assert rows[-1][f] == pytest.approx(16 / 3 - 2.5 - 4 / 3 * math.exp(0.75), abs=1e-12)
    cols, rows = table(run("evolve", "--case", "ii", "--l", "0", "--n-steps", "64")[1])
    assert {r[f] for r in rows} == {1.0}
    assert rows[-1][cols.index("u")] == 10.0
    cols, rows = table(run("evolve", "--case", "i", "--l", "0", "--u-max", "99")[1])
    # 4096 default steps over 99 r0
    assert rows[-1][f] == pytest.approx(-0.99, rel=1e-8)
    assert max(r[cols.index("max_residual")] for r in rows) <= 1e-10


def test_evolve_every_keeps_the_last_row():
    _, rows = table(run("evolve", "--case", "i", "--l", "2", "--n-steps", "100", "--every", "30")[1])
    assert [r[0] for r in rows] == pytest.approx([0.0, 3.0, 6.0, 9.0, 10.0])


def test_spectrum_example():
    cols, rows = table(run("spectrum", "--l-max", "3")[1])
    assert cols == ["l", "lambda", "g_caseI", "k_caseI_r0", "g_caseII", "k_caseII_r0", "k_over_lambda"]
    k = cols.index("k_caseI_r0")
    assert [r[:2] for r in rows] == [[0, 0], [1, 2], [2, 6], [3, 12]]
    assert rows[0][k] == 0 and rows[1][k] == 0
    assert rows[2][k] == pytest.approx(64 - 40 * math.exp(0.5), rel=1e-13)
    assert rows[3][k] == pytest.approx(-4.9711833, abs=1e-7)


def test_bondi_example():
    code, out, _ = run("bondi", "--case", "i", "--c1", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["dP"] == pytest.approx([math.exp(1.5) / 3 - 4 / 3, 0, 0], abs=1e-12)
    assert abs(rep["dE"]) <= 1e-12 and abs(rep["dMB"]) <= 1e-12


def test_verify_exit_codes():
    code, out, _ = run("verify")
    assert code == 0
    assert out.strip().splitlines()[-1].startswith("PASS")
    code, out, _ = run("verify", "--tol", "1e-30")
    assert code == 1
    assert "FAIL" in out


def test_json_output_and_output_path(tmp_path):
    path = tmp_path / "spectrum.json"
    code, out, _ = run("spectrum", "--l-max", "4", "--output-format", "json", "-o", str(path))
    assert code == 0 and out == ""
    data = json.loads(path.read_text())
    assert data["columns"][0] == "l" and len(data["rows"]) == 5


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"r0": 2.0, "l_max": 2}))
    _, rows = table(run("spectrum", "--config", str(cfg))[1])
    assert len(rows) == 3
    # flags override the file
    _, rows = table(run("spectrum", "--config", str(cfg), "--l-max", "5")[1])
    assert len(rows) == 6
    cfg.write_text(json.dumps({"r0": 2.0, "colour": "blue"}))
    code, _, err = run("spectrum", "--config", str(cfg))
    assert code == 2 and "colour" in err
    cfg.write_text("[1, 2]")
    assert run("spectrum", "--config", str(cfg))[0] == 2
    assert run("spectrum", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_output_is_deterministic():
    a = run("evolve", "--case", "ii", "--l", "3", "--n-steps", "256")[1]
    b = run("evolve", "--case", "ii", "--l", "3", "--n-steps", "256")[1]
    assert a == b


def test_lengths_scale_with_r0():
    cols, one = table(run("background", "--s", "0.7", "--sbar", "0.2")[1])
    _, two = table(run("background", "--s", "1.4", "--sbar", "0.4", "--r0", "2")[1])
    rec1, rec2 = dict(zip(cols, one[0])), dict(zip(cols, two[0]))
    assert rec2["r"] == pytest.approx(2 * rec1["r"], rel=1e-15)
    assert rec2["rho"] == pytest.approx(rec1["rho"] / 4, rel=1e-15)
    assert rec2["omega_sq"] == pytest.approx(rec1["omega_sq"], rel=1e-15)


def test_figures(tmp_path):
    pytest.importorskip("matplotlib")
    assert run("spectrum", "--l-max", "8", "--figures", str(tmp_path))[0] == 0
    assert run("evolve", "--case", "i", "--l", "2", "--n-steps", "64", "--figures", str(tmp_path))[0] == 0
    pngs = sorted(p.name for p in tmp_path.iterdir())
    assert "spectrum.png" in pngs and any(p.startswith("evolve_") for p in pngs)
    assert all((tmp_path / p).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n" for p in pngs)


def test_format_float():
    assert cli.format_float(0.1) == "0.10000000000000001"
    assert cli.format_float(-0.0) == "0"
    assert cli.format_float(3) == "3"
    assert float(cli.format_float(math.pi)) == math.pi
    with pytest.raises(ValueError):
        cli.format_float(math.inf)
    with pytest.raises(TypeError):
        cli.format_float(True)


def test_to_json_round_trips():
    obj = {"a": [1, 0.5, -1e-300], "b": "x", "c": None, "d": (2.5,)}
    back = json.loads(cli.to_json(obj))
    assert back == {"a": [1, 0.5, -1e-300], "b": "x", "c": None, "d": [2.5]}


def test_run_config_validation():
    with pytest.raises(cli.UsageError):
        cli.RunConfig(r0=0.0).validate()
    with pytest.raises(cli.UsageError):
        cli.RunConfig(n_steps=0).validate()
    assert cli.RunConfig(r0=3.0).resolved().u_max == 30.0


def test_main_module_help(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--help"])
    assert exc.value.code == 0
    assert "verify" in capsys.readouterr().out
