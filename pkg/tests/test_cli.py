import json
import os
from importlib.resources import files

import jsonschema
import pytest

from tailindex.cli import main
from tailindex.diagnostics import QuadratureError
from tailindex.estimators import SNOW_DATA

SCHEMA = json.loads(files("tailindex").joinpath("cli_schema.json").read_text())


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    assert code == 0
    payload = json.loads(out)
    jsonschema.validate(payload, SCHEMA)
    return payload


def snow_file(tmp_path):
    path = tmp_path / "snow.txt"
    path.write_text("".join(f"{v}\n" for v in SNOW_DATA))
    return str(path)


def test_schema_itself_is_valid():
    jsonschema.Draft7Validator.check_schema(SCHEMA)


def test_help_documents_flags(capsys):
    assert main(["--help"]) == 0
    out = capsys.readouterr().out
    for name in (
        "estimate",
        "hillplot",
        "fixedk",
        "meplot",
        "bootstrap",
        "diag2nd",
        "optp",
        "simulate",
        "snow-demo",
    ):
        assert name in out
    assert main(["estimate", "--help"]) == 0
    est_help = capsys.readouterr().out
    for flag in ("--input", "--model", "--column", "--n", "--seed", "--k", "--p",
                 "--level", "--output", "--format"):
        assert flag in est_help
    assert "0.95" in est_help


def test_argument_errors_exit_2(capsys, tmp_path):
    assert main(["estimate", "--bogus"]) == 2
    assert main(["no-such-command"]) == 2
    # exactly one source
    assert main(["estimate", "--k", "5"]) == 2
    path = snow_file(tmp_path)
    assert main(
        ["estimate", "--input", path, "--model", "pareto:alpha=1", "--k", "5"]
    ) == 2
    assert main(["estimate", "--input", path, "--k", "0"]) == 2
    assert main(["estimate", "--model", "pareto:alpha=1", "--k", "5"]) == 2
    assert main(["estimate", "--input", path, "--k", "5", "--format", "csv"]) == 2
    capsys.readouterr()


def test_estimate_snow(capsys, tmp_path):
    payload = run_json(
        capsys, ["estimate", "--input", snow_file(tmp_path), "--k", "17"]
    )
    assert abs(payload["gamma_hat"] - 0.0829) <= 5e-4
    assert payload["n"] == 41 and payload["k"] == 17 and payload["p"] == 0.0
    assert "h" not in payload
    assert payload["ci"]["level"] == 0.95
    assert abs(payload["ci"]["lower"] - 0.0562) <= 5e-4
    assert abs(payload["ci"]["upper"] - 0.1580) <= 5e-4


def test_estimate_reports_reasons_when_theory_fails(capsys, tmp_path):
    path = tmp_path / "flat.txt"
    path.write_text("2.0\n" * 5)
    payload = run_json(capsys, ["estimate", "--input", str(path), "--k", "4"])
    assert payload["gamma_hat"] == 0.0
    assert payload["std_err"] is None
    assert "std_err" in payload["notes"]


def test_estimate_data_errors_exit_3(capsys, tmp_path):
    assert main(["estimate", "--input", "/no/such/file", "--k", "3"]) == 3
    bad = tmp_path / "bad.txt"
    bad.write_text("1.0\n2.0\nbogus\n")
    assert main(["estimate", "--input", str(bad), "--k", "2"]) == 3
    err = capsys.readouterr().err
    assert ":3:" in err


def test_estimate_model_source(capsys):
    payload = run_json(
        capsys,
        ["estimate", "--model", "pareto:alpha=2", "--n", "500", "--seed", "9",
         "--k", "50", "--p", "-1"],
    )
    assert payload["source"] == "pareto:alpha=2,delta=1"
    assert "h" in payload
    assert abs(payload["gamma_hat"] - 0.5) < 0.15


def test_csv_column_input(capsys, tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("day,depth\n1,1.5\n2,2.5\n3,1.2\n4,3.5\n")
    payload = run_json(
        capsys,
        ["estimate", "--input", str(path), "--column", "depth", "--k", "2"],
    )
    assert payload["n"] == 4
    assert main(["estimate", "--input", str(path), "--column", "nope", "--k", "2"]) == 3
    capsys.readouterr()


def test_hillplot_csv_band_gating(capsys):
    code = main(["hillplot", "--model", "pareto:alpha=1", "--n", "50", "--seed", "3"])
    out = capsys.readouterr().out
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0] == "x,hill,gh_p-0.1,band_lo,band_hi"
    assert len(lines) == 1 + 49
    # sqrt(k) <= 1.96 leaves the band cells empty
    for row in lines[1:4]:
        assert row.endswith(",,")
    assert not lines[4].endswith(",,")


def test_hillplot_json_matches_schema(capsys):
    payload = run_json(
        capsys,
        ["hillplot", "--model", "pareto:alpha=1", "--n", "50", "--seed", "3",
         "--format", "json"],
    )
    assert payload["command"] == "hillplot"
    assert payload["band"]["lo"][0] is None
    assert payload["band"]["lo"][10] is not None
    assert len(payload["x"]) == 49


def test_fixedk_default_power_grid(capsys):
    code = main(["fixedk", "--model", "pareto:alpha=1", "--n", "60", "--seed", "3",
                 "--k", "20"])
    out = capsys.readouterr().out
    assert code == 0
    header = [l for l in out.splitlines() if not l.startswith("#")][0]
    assert header == "x,hill,gh_p-0.1,gh_p-1,band_lo,band_hi" or header == (
        "x,hill,gh_p-0.1,gh_p-1"
    )
    code = main(["fixedk", "--model", "pareto:alpha=1", "--n", "60", "--seed", "3",
                 "--k", "20", "--p", "-2"])
    out = capsys.readouterr().out
    assert code == 0
    header = [l for l in out.splitlines() if not l.startswith("#")][0]
    assert header == "x,hill,gh_p-2"


def test_meplot_series(capsys, tmp_path):
    payload = run_json(
        capsys,
        ["meplot", "--input", snow_file(tmp_path), "--format", "json"],
    )
    assert payload["command"] == "meplot"
    assert sorted(payload["curves"]) == ["mean_excess"]
    assert payload["band"] is None


def test_simulate_reproducible_files(tmp_path, capsys):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    argv = ["simulate", "--model", "hillhorror:alpha=1", "--n", "1500", "--seed", "7"]
    assert main(argv + ["--output", str(a)]) == 0
    assert main(argv + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = a.read_text().splitlines()
    assert len(rows) == 1500
    assert all(float(r) > 0 for r in rows)
    # no temp files left behind by the atomic write
    assert [p.name for p in tmp_path.iterdir() if p.name.startswith(".tailindex-")] == []
    # simulated output feeds straight back in as plain input
    assert main(["estimate", "--input", str(a), "--k", "80"]) == 0
    capsys.readouterr()


def test_bootstrap_cli_deterministic(tmp_path, capsys):
    a = tmp_path / "band_a.csv"
    b = tmp_path / "band_b.csv"
    argv = [
        "bootstrap", "--model", "hillhorror:alpha=0.5", "--n", "300", "--seed", "5",
        "--k", "20", "--exceedances", "60", "--replicates", "10",
    ]
    assert main(argv + ["--output", str(a)]) == 0
    assert main(argv + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert "# kind=bootstrap_band" in text
    header = [l for l in text.splitlines() if not l.startswith("#")][0]
    assert header == "x,min,mean,max"
    capsys.readouterr()


def test_diag2nd_default_ladder_and_validation(capsys):
    payload = run_json(
        capsys,
        ["diag2nd", "--model", "pareto:alpha=2", "--format", "json"],
    )
    assert payload["x"] == [2.0, 10.0, 100.0, 1000.0, 10000.0]
    assert all(abs(v - 0.5) < 1e-12 for v in payload["curves"]["j"])
    assert main(["diag2nd", "--model", "pareto:alpha=2", "--t", "0.5"]) == 2
    capsys.readouterr()


def test_optp_values(capsys):
    payload = run_json(capsys, ["optp", "--gamma", "1"])
    assert abs(payload["p_opt"] - (-1.160526139410811)) < 1e-6
    assert abs(payload["interval"][0] - (-7.64)) <= 0.05
    assert payload["interval"][1] == 0.0
    halved = run_json(capsys, ["optp", "--gamma", "2"])
    assert abs(halved["p_opt"] - payload["p_opt"] / 2.0) < 1e-6
    assert abs(halved["interval"][0] - payload["interval"][0] / 2.0) < 1e-9


def test_snow_demo_payload(capsys):
    payload = run_json(capsys, ["snow-demo"])
    assert payload["threshold"] == 1.65
    assert payload["n_exceedances"] == 18
    assert abs(payload["hill_gamma"] - 0.0829) <= 5e-4
    assert abs(payload["generalized_gamma"] - 0.0831) <= 5e-4
    assert abs(payload["ci"]["lower"] - 0.0562) <= 5e-4
    assert abs(payload["ci"]["upper"] - 0.1580) <= 5e-4
    assert 0.0 < payload["pot_probability"] < 0.01


def test_quadrature_failure_exits_4(capsys, monkeypatch):
    import tailindex.cli as cli_module

    def boom(model, t_list):
        raise QuadratureError("probe: no convergence")

    monkeypatch.setattr(cli_module, "second_order_curve", boom)
    assert main(["diag2nd", "--model", "pareto:alpha=1"]) == 4
    assert "probe" in capsys.readouterr().err


def test_output_overwrites_atomically(tmp_path, capsys):
    target = tmp_path / "out.json"
    target.write_text("stale")
    assert main(["optp", "--gamma", "1", "--output", str(target)]) == 0
    payload = json.loads(target.read_text())
    assert payload["command"] == "optp"
    leftovers = [p for p in os.listdir(tmp_path) if p.startswith(".tailindex-")]
    assert leftovers == []
    capsys.readouterr()
