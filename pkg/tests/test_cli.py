"""Command-line interface: subcommands, exit codes, deterministic outputs."""

import json

import pytest

from fieldquant.cli import main


def run(args):
    return main(args)


def read(path):
    return path.read_bytes()


def test_verify_symbolic_filter_passes(capsys):
    assert run(["verify", "--filter", "symbolic"]) == 0
    out = capsys.readouterr().out
    assert "symbolic.conserved" in out
    assert "0 failures" in out


def test_verify_adhoc_operator_conserved(capsys):
    assert run(["verify", "--filter", "symbolic", "--op", "px - q*E*t"]) == 0
    assert "symbolic.adhoc" in capsys.readouterr().out


def test_verify_adhoc_operator_not_conserved():
    assert run(["verify", "--filter", "symbolic", "--op", "px"]) == 1


def test_verify_tampered_hamiltonian_fails(tmp_path):
    cfg = {"m": 1, "q": 1, "E": 1, "L": 8.0,
           "hamiltonian_override": "1/2*px^2 + q*E*x"}
    path = tmp_path / "tampered.json"
    path.write_text(json.dumps(cfg))
    assert run(["verify", "--filter", "symbolic", "--config", str(path)]) == 1


def test_verify_json_output(capsys, tmp_path):
    assert run(["verify", "--filter", "symbolic", "--json",
                "--out-dir", str(tmp_path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["all_passed"] is True
    assert (tmp_path / "verify_report.json").exists()
    saved = json.loads((tmp_path / "verify_report.json").read_text())
    assert saved == payload


def test_verify_every_check_carries_anchor(capsys):
    run(["verify", "--filter", "symbolic", "--json"])
    payload = json.loads(capsys.readouterr().out)
    assert all(c["anchor"].strip() for c in payload["checks"])


def test_config_error_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"q": 1, "E": 1, "L": 8.0}))  # missing mass
    assert run(["verify", "--config", str(path)]) == 2


def test_operator_parse_error_exit_code():
    assert run(["verify", "--filter", "symbolic", "--op", "px + @"]) == 2


def test_usage_error_is_exit_2():
    with pytest.raises(SystemExit) as err:
        run(["quantize"])  # missing required flags
    assert err.value.code == 2


def test_quantize_scan_marks_integer_hits(tmp_path, capsys):
    assert run(["quantize", "--dx", "6.283185307179586", "--dt-min", "0.5",
                "--dt-max", "3.0", "--dt-steps", "6",
                "--out-dir", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "quantize_summary.json").read_text())
    assert [h["n"] for h in summary["integer_hits"]] == [1, 2, 3]
    csv_text = (tmp_path / "quantize_scan.csv").read_text()
    assert csv_text.startswith("#")
    header = [line for line in csv_text.splitlines() if not line.startswith("#")][0]
    assert header.split(",")[:4] == ["dt", "n_real", "nearest", "is_quantized"]


def test_quantize_zero_dt_marks_row_not_abort(tmp_path):
    assert run(["quantize", "--dx", "1.0", "--dt-min", "-0.01", "--dt-max", "0.01",
                "--dt-steps", "3", "--out-dir", str(tmp_path)]) == 0
    rows = [line for line in (tmp_path / "quantize_scan.csv").read_text().splitlines()
            if not line.startswith("#")][1:]
    assert len(rows) == 3
    assert "undefined current" in rows[1]


def test_quantize_si_mode_adds_ohm_column(tmp_path):
    cfg = {"units": "si", "m": 9.1093837015e-31, "q": "e", "E": 1.0, "L": 1.0}
    path = tmp_path / "si.json"
    path.write_text(json.dumps(cfg))
    assert run(["quantize", "--config", str(path), "--dx", "1.0",
                "--dt-min", "1e-15", "--dt-max", "1e-14", "--dt-steps", "4",
                "--out-dir", str(tmp_path)]) == 0
    header = [line for line in (tmp_path / "quantize_scan.csv").read_text().splitlines()
              if not line.startswith("#")][0]
    assert "R_ohm" in header.split(",")


def test_outputs_are_byte_identical(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    d1.mkdir(), d2.mkdir()
    args = ["quantize", "--dx", "6.283185307179586", "--dt-min", "0.1",
            "--dt-max", "2.0", "--dt-steps", "40"]
    assert run(args + ["--out-dir", str(d1)]) == 0
    assert run(args + ["--out-dir", str(d2)]) == 0
    assert read(d1 / "quantize_scan.csv") == read(d2 / "quantize_scan.csv")
    assert read(d1 / "quantize_summary.json") == read(d2 / "quantize_summary.json")


def test_eval_fundamental_with_current(tmp_path):
    assert run(["eval", "--family", "fundamental", "--times", "0.0,0.785398163397448",
                "--grid-n", "64", "--current", "--out-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "eval_fundamental.csv").read_text().splitlines()
    header = [line for line in lines if not line.startswith("#")][0]
    assert header == "x,t,re,im,abs2,J,rho,v"
    data = [line for line in lines if not line.startswith("#")][1:]
    assert len(data) == 128  # 64 points x 2 times


def test_eval_is_deterministic(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    d1.mkdir(), d2.mkdir()
    args = ["eval", "--family", "taylor", "--dt-shift", "0.1", "--order", "6",
            "--times", "1.0", "--grid-n", "32"]
    assert run(args + ["--out-dir", str(d1)]) == 0
    assert run(args + ["--out-dir", str(d2)]) == 0
    assert read(d1 / "eval_taylor.csv") == read(d2 / "eval_taylor.csv")


def test_eval_family_y(tmp_path):
    cfg = {"m": 1, "q": 1, "E": 1, "B": 1.0, "L": 8.0, "geometry": "parallel_eb"}
    path = tmp_path / "par.json"
    path.write_text(json.dumps(cfg))
    assert run(["eval", "--config", str(path), "--family", "family-y", "--n", "1",
                "--shift", "0.5", "--grid-n", "64", "--out-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "eval_family_y.csv").read_text().splitlines()
    header = [line for line in lines if not line.startswith("#")][0]
    assert header == "y,z,t,re,im,abs2"


def test_eval_family_grid_too_coarse_is_reported(tmp_path, capsys):
    cfg = {"m": 1, "q": 1, "E": 1, "B": 1.0, "L": 8.0, "geometry": "parallel_eb"}
    path = tmp_path / "par.json"
    path.write_text(json.dumps(cfg))
    code = run(["eval", "--config", str(path), "--family", "family-y", "--n", "1",
                "--shift", "0.5", "--grid-n", "32", "--out-dir", str(tmp_path)])
    assert code == 2
    assert "alias" in capsys.readouterr().err


def test_eval_nyquist_violation_exit_2(tmp_path, capsys):
    code = run(["eval", "--family", "fundamental", "--times", "1000.0",
                "--grid-n", "64", "--out-dir", str(tmp_path)])
    assert code == 2
    assert "maximum admissible t" in capsys.readouterr().err


def test_evolve1d_zero_steps_single_row(tmp_path):
    assert run(["evolve1d", "--steps", "0", "--grid-n", "128",
                "--out-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "evolve1d_trajectory.csv").read_text().splitlines()
    data = [line for line in lines if not line.startswith("#")]
    assert data[0].startswith("t,norm,x_mean")
    assert len(data) == 2  # header + initial row


def test_evolve1d_monotone_time_and_richardson(tmp_path):
    cfg = {"m": 1, "q": 1, "E": 1, "L": 40.0}  # box wide enough for the packet
    path = tmp_path / "wide.json"
    path.write_text(json.dumps(cfg))
    assert run(["evolve1d", "--config", str(path), "--dt", "2e-3", "--steps", "128",
                "--cadence", "16",
                "--grid-n", "512", "--richardson", "--out-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "evolve1d_trajectory.csv").read_text().splitlines()
    rows = [line.split(",") for line in lines if not line.startswith("#")][1:]
    times = [float(r[0]) for r in rows]
    assert times == sorted(times) and len(times) == 9
    summary = json.loads((tmp_path / "evolve1d_summary.json").read_text())
    assert abs(summary["order_estimate"] - 2.0) < 0.2


def test_evolve_landau_run(tmp_path):
    cfg = {"m": 1, "q": 1, "E": 1, "B": 1.0, "L": 8.0, "geometry": "parallel_eb"}
    path = tmp_path / "par.json"
    path.write_text(json.dumps(cfg))
    assert run(["evolve-landau", "--config", str(path), "--periods", "1",
                "--steps-per-period", "64", "--grid-n", "32",
                "--out-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "evolve_landau_trajectory.csv").read_text().splitlines()
    rows = [line.split(",") for line in lines if not line.startswith("#")][1:]
    norms = [float(r[1]) for r in rows]
    fidelity = [float(r[-1]) for r in rows]
    assert max(abs(n - norms[0]) for n in norms) < 1e-10
    assert fidelity[-1] > 1.0 - 1e-4


def test_evolve_landau_requires_parallel_geometry():
    assert run(["evolve-landau", "--periods", "1", "--steps-per-period", "16",
                "--grid-n", "32"]) == 2


def test_units_override_flag(tmp_path):
    assert run(["eval", "--family", "fundamental", "--times", "0.0",
                "--grid-n", "32", "--units", "cgs", "--out-dir", str(tmp_path)]) == 0
    text = (tmp_path / "eval_fundamental.csv").read_text()
    assert "# config.units=cgs" in text
