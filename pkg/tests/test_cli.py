import json
import subprocess
import sys

import numpy as np
import pytest

from kantorov.cli import main

BASE = {
    "domain": {"kind": "interval"},
    "operator": {"a": 1.0, "measures": {"kind": "constant_lebesgue"}},
    "function": {"name": "abs_dist", "params": [0.5]},
    "experiment": {"n_list": [4, 16], "grid_resolution": 100},
}


def write_config(tmp_path, name, **overrides):
    doc = json.loads(json.dumps(BASE))
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(doc.get(key), dict):
            doc[key].update(value)
        else:
            doc[key] = value
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_converge_writes_csv_and_json(tmp_path, capsys):
    csv = tmp_path / "out.csv"
    js = tmp_path / "out.json"
    cfgp = write_config(
        tmp_path, "c.json",
        experiment={"n_list": [4, 16], "p": 2, "grid_resolution": 100},
        output={"csv_path": str(csv), "json_path": str(js)},
    )
    assert main(["converge", "--config", str(cfgp)]) == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "n,sup_error,lp_error,bound_id,bound_value,ratio,pass"
    assert len(lines) == 3
    n, sup, lp, rest = lines[1].split(",", 3)
    assert n == "4" and float(sup) > float(lp) > 0.0
    assert rest == ",,,"
    doc = json.loads(js.read_text())
    assert doc["meta"]["command"] == "converge"
    assert doc["meta"]["config"]["operator"]["a"] == 1.0
    assert len(doc["rows"]) == 2
    assert "loglog_slope" in doc["summary"]
    out = capsys.readouterr().out
    assert "sup_error" in out and "wrote" in out


def test_converge_is_byte_identical(tmp_path):
    csv = tmp_path / "out.csv"
    cfgp = write_config(
        tmp_path, "c.json",
        experiment={"n_list": [2, 8], "p": 1, "grid_resolution": 60},
        output={"csv_path": str(csv)},
    )
    assert main(["converge", "--config", str(cfgp)]) == 0
    first = csv.read_bytes()
    assert main(["converge", "--config", str(cfgp)]) == 0
    assert csv.read_bytes() == first


def test_converge_appends_requested_bound_rows(tmp_path, capsys):
    csv = tmp_path / "out.csv"
    cfgp = write_config(
        tmp_path, "c.json",
        experiment={
            "n_list": [4, 16],
            "p": 2,
            "grid_resolution": 100,
            "bounds": ["omega_total"],
        },
        output={"csv_path": str(csv)},
    )
    assert main(["converge", "--config", str(cfgp)]) == 0
    lines = csv.read_text().splitlines()
    assert len(lines) == 5  # header + 2 error rows + 2 bound rows
    bound = [ln.split(",") for ln in lines[3:]]
    assert all(row[3] == "omega_total" and row[6] == "true" for row in bound)
    assert all(0.0 < float(row[5]) < 1.0 for row in bound)  # measured/bound
    assert "[PASS] bound omega_total" in capsys.readouterr().out


def test_eval_prints_values(tmp_path, capsys):
    csv = tmp_path / "ev.csv"
    cfgp = write_config(
        tmp_path, "e.json",
        operator={"a": 0.0},
        function={"name": "affine", "params": [0.25, 0.5]},
        experiment={"n_list": [3], "points": [0.2, [0.8]]},
        output={"csv_path": str(csv)},
    )
    assert main(["eval", "--config", str(cfgp)]) == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "n,x,value"
    # a = 0 and affine f: operator reproduces f exactly
    assert float(lines[1].split(",")[2]) == pytest.approx(0.35, abs=1e-11)
    assert float(lines[2].split(",")[2]) == pytest.approx(0.65, abs=1e-11)


def test_verify_runs_moment_suite_and_bounds(tmp_path):
    csv = tmp_path / "v.csv"
    cfgp = write_config(
        tmp_path, "v.json",
        experiment={"n_list": [1, 5], "p": 2,
                    "bounds": ["lambda_p_bound", "omega_total"],
                    "grid_resolution": 150},
        output={"csv_path": str(csv)},
    )
    assert main(["verify", "--config", str(cfgp)]) == 0
    rows = [l.split(",") for l in csv.read_text().splitlines()[1:]]
    ids = {r[3] for r in rows}
    assert ids == {"moment_affine", "moment_quadratic", "lambda_p_bound", "omega_total"}
    assert all(r[6] == "true" for r in rows)


def test_verify_seed_changes_sampled_points(tmp_path):
    csv = tmp_path / "v.csv"
    cfgp = write_config(
        tmp_path, "v.json",
        experiment={"n_list": [2]},
        output={"csv_path": str(csv)},
    )
    assert main(["verify", "--config", str(cfgp), "--seed", "1"]) == 0
    first = csv.read_text()
    assert main(["verify", "--config", str(cfgp), "--seed", "1"]) == 0
    assert csv.read_text() == first  # same seed, same bytes
    assert main(["verify", "--config", str(cfgp), "--seed", "2"]) == 0
    assert csv.read_text() != first  # errors move with the sample


def test_preserve_passes_for_convex_function(tmp_path):
    csv = tmp_path / "p.csv"
    cfgp = write_config(
        tmp_path, "p.json",
        experiment={"n_list": [2, 6], "grid_resolution": 60,
                    "modes": ["convex", "sandwich", "lipschitz_l1"]},
        output={"csv_path": str(csv)},
    )
    assert main(["preserve", "--config", str(cfgp)]) == 0
    rows = [l.split(",") for l in csv.read_text().splitlines()[1:]]
    assert len(rows) == 6
    assert {r[3] for r in rows} == {"convex", "sandwich", "lipschitz_l1"}


def test_preserve_fails_for_nonconvex_mode(tmp_path):
    cfgp = write_config(
        tmp_path, "bad.json",
        domain={"kind": "hypercube", "dim": 2},
        function={"name": "product12", "params": []},
        experiment={"n_list": [2], "grid_resolution": 12, "modes": ["convex"]},
    )
    assert main(["preserve", "--config", str(cfgp)]) == 1


def test_preserve_default_modes_pass_in_2d(tmp_path, capsys):
    # the family only preserves convexity along axis/edge directions in
    # several variables, so the derived defaults must stay passable
    for domain, expected in (
        ({"kind": "simplex", "dim": 2}, "axially_convex"),
        ({"kind": "hypercube", "dim": 2}, "coordinate_convex"),
    ):
        cfgp = write_config(
            tmp_path, "d.json",
            domain=domain,
            function={"name": "exp_sum", "params": []},
            experiment={"n_list": [2, 5], "grid_resolution": 12},
            output={"csv_path": str(tmp_path / "d.csv")},
        )
        assert main(["preserve", "--config", str(cfgp)]) == 0
        out = capsys.readouterr().out
        assert expected in out and " convex " not in out


def test_moduli_table(tmp_path):
    csv = tmp_path / "m.csv"
    cfgp = write_config(
        tmp_path, "m.json",
        function={"name": "monomial", "params": [1, 2]},
        experiment={"grid_resolution": 1000, "p": 1,
                    "delta_list": [0.1, 0.25]},
        output={"csv_path": str(csv)},
    )
    assert main(["moduli", "--config", str(cfgp)]) == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "delta,omega1,omega2,tau_p,omega_kp"
    row = lines[1].split(",")
    assert float(row[1]) == pytest.approx(0.19, abs=1e-3)
    row = lines[2].split(",")
    assert float(row[2]) == pytest.approx(0.125, abs=1e-3)


def test_exit_code_2_on_malformed_configs(tmp_path, capsys):
    # invalid JSON
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["converge", "--config", str(bad)]) == 2
    assert "line 1" in capsys.readouterr().err
    # missing file
    assert main(["converge", "--config", str(tmp_path / "nope.json")]) == 2
    capsys.readouterr()
    # schema violations carry the field path
    cases = [
        ({"operator": {"a": -2.0}}, "operator.a"),
        ({"domain": {"kind": "triangle"}}, "domain.kind"),
        ({"function": {"name": "nope"}}, "function"),
        ({"experiment": {"n_list": [4], "stride": 2}}, "experiment"),
        ({"experiment": {"n_list": [0]}}, "n_list"),
        ({"experiment": {"n_list": [4], "p": "inf"}}, "experiment.p"),
    ]
    for overrides, needle in cases:
        cfgp = write_config(tmp_path, "x.json", **overrides)
        assert main(["converge", "--config", str(cfgp)]) == 2, overrides
        assert needle in capsys.readouterr().err


def test_exit_code_2_on_command_mismatch(tmp_path, capsys):
    cfgp = write_config(tmp_path, "c.json", experiment={"n_list": [4], "command": "eval"})
    assert main(["converge", "--config", str(cfgp)]) == 2
    assert "experiment.command" in capsys.readouterr().err


def test_dirac_needs_positive_a(tmp_path, capsys):
    cfgp = write_config(
        tmp_path, "d.json",
        operator={"a": 0.0, "measures": {"kind": "dirac_shift", "point": [0.5]}},
    )
    assert main(["converge", "--config", str(cfgp)]) == 2
    assert "dirac" in capsys.readouterr().err.lower()


def test_console_script_entry_point(tmp_path):
    cfgp = write_config(tmp_path, "c.json", experiment={"n_list": [4], "grid_resolution": 50})
    proc = subprocess.run(
        [sys.executable, "-m", "kantorov.cli", "converge", "--config", str(cfgp)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "sup_error" in proc.stdout


def test_power_measure_config(tmp_path):
    csv = tmp_path / "pw.csv"
    cfgp = write_config(
        tmp_path, "pw.json",
        operator={"a": 2.0, "measures": {
            "kind": "power_of_base",
            "base": {"kind": "discrete", "atoms": [[0.0], [1.0]], "weights": [0.5, 0.5]},
            "exponent": 2,
        }},
        experiment={"n_list": [3], "grid_resolution": 50},
        output={"csv_path": str(csv)},
    )
    assert main(["verify", "--config", str(cfgp)]) == 0
    rows = csv.read_text().splitlines()[1:]
    assert all(r.endswith("true") for r in rows)
