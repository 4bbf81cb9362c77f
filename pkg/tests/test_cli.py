"""Tests for the command-line driver: CSV/JSON outputs and exit codes."""

import json

import numpy as np
import pytest

from csprk.cli import main


def run_cli(args):
    return main([str(a) for a in args])


def read_csv(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [ln for ln in lines[1:] if not ln.startswith("#")]
    data = np.array([[float(v) for v in ln.split(",")] for ln in rows])
    return header, data


def test_run_linear_csv_schema(tmp_path):
    out = tmp_path / "run.csv"
    code = run_cli(["run", "--preset", "ex31", "--params", "2", "--problem", "linear",
                    "--h", "0.1", "--steps", "50", "--out", out])
    assert code == 0
    header, data = read_csv(out)
    assert header == ["t", "p_1", "q_1", "err_H", "err_sol", "iters"]
    assert data.shape == (51, 6)
    assert np.array_equal(data[0], [0.0, 0.5, 0.0, 0.0, 0.0, 0.0])
    assert np.allclose(data[:, 0], 0.1 * np.arange(51), atol=1e-12)
    assert np.max(data[:, 3]) <= 1e-11  # energy column


def test_run_kepler_csv_schema(tmp_path):
    out = tmp_path / "kepler.csv"
    code = run_cli(["run", "--method", "glrk4", "--problem", "kepler",
                    "--h", "0.1", "--steps", "100", "--out", out])
    assert code == 0
    header, data = read_csv(out)
    assert header == ["t", "p_1", "p_2", "q_1", "q_2",
                      "err_H", "err_I", "err_L", "err_sol", "iters"]
    assert np.max(data[:, 6]) <= 1e-12  # angular momentum column


def test_run_henon_heiles_columns(tmp_path):
    out = tmp_path / "hh.csv"
    code = run_cli(["run", "--preset", "ex32", "--params", "1,0",
                    "--problem", "henon-heiles", "--steps", "10", "--out", out])
    assert code == 0
    header, _ = read_csv(out)
    assert header == ["t", "p_1", "p_2", "q_1", "q_2", "err_H", "iters"]


def test_run_zero_steps(tmp_path):
    out = tmp_path / "zero.csv"
    assert run_cli(["run", "--preset", "avf", "--problem", "linear",
                    "--steps", "0", "--out", out]) == 0
    header, data = read_csv(out)
    assert data.shape == (1, len(header))
    assert np.array_equal(data[0, 3:], np.zeros(len(header) - 3))


def test_run_deterministic_bytes(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    args = ["run", "--preset", "ex33", "--params", "1,0", "--problem", "kepler",
            "--h", "0.1", "--steps", "20", "--out"]
    assert run_cli(args + [a]) == 0
    assert run_cli(args + [b]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_tableau_json_round_trip(tmp_path):
    # a preset exported to JSON and re-imported produces identical bytes
    from csprk import preset

    alpha = preset("ex33", [1.0, 0.0])
    tab_path = tmp_path / "tab.json"
    tab_path.write_text(json.dumps(alpha.to_dict()))
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    common = ["--problem", "kepler", "--h", "0.1", "--steps", "20", "--quad", "6"]
    assert run_cli(["run", "--preset", "ex33", "--params", "1,0"] + common + ["--out", a]) == 0
    assert run_cli(["run", "--tableau", tab_path] + common + ["--out", b]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_order_json(tmp_path, capsys):
    assert run_cli(["order", "--method", "explicit_euler", "--problem", "linear"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["h"] == [0.1, 0.05, 0.025, 0.0125]
    assert len(report["error"]) == 4
    assert abs(report["fitted_slope"] - 1.0) <= 0.15


def test_order_custom_h_list(capsys):
    assert run_cli(["order", "--preset", "avf", "--problem", "linear",
                    "--h-list", "0.1,0.05"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["h"] == [0.1, 0.05]
    assert abs(report["fitted_slope"] - 2.0) <= 0.2


def test_order_requires_exact_solution():
    assert run_cli(["order", "--preset", "avf", "--problem", "henon-heiles"]) == 1


def test_check_ex33(capsys):
    assert run_cli(["check", "--preset", "ex33", "--params", "1,0", "--nu", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["energy_condition"] == "pass"
    assert report["eta"] == 2
    assert report["zeta"] == 1
    assert report["certified_order"] == 4
    assert report["k_min"] == 6
    assert report["residuals"]["symmetry"] <= 1e-12


def test_check_avf(capsys):
    assert run_cli(["check", "--preset", "avf"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["eta"] == 1
    assert report["zeta"] == 0
    assert report["certified_order"] == 2
    assert "k_min" not in report


def test_check_bad_weights(tmp_path, capsys):
    path = tmp_path / "tab.json"
    path.write_text(json.dumps({"s": 1, "r": 1, "alpha": [[2.0]]}))
    assert run_cli(["check", "--tableau", path]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["certified_order"] == 0
    assert report["eta"] is None


def test_check_rejects_baseline():
    assert run_cli(["check", "--method", "glrk4"]) == 1


def test_malformed_tableau_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{oops")
    assert run_cli(["check", "--tableau", path]) == 1
    assert run_cli(["run", "--tableau", path, "--problem", "linear",
                    "--steps", "1", "--out", str(tmp_path / "x.csv")]) == 1


def test_method_source_exclusive(tmp_path):
    assert run_cli(["run", "--preset", "avf", "--method", "glrk4",
                    "--problem", "linear", "--steps", "1",
                    "--out", str(tmp_path / "x.csv")]) == 1
    assert run_cli(["run", "--problem", "linear", "--steps", "1",
                    "--out", str(tmp_path / "y.csv")]) == 1


def test_unknown_flags_exit_1(tmp_path):
    assert run_cli(["run", "--nope"]) == 1
    assert run_cli(["frobnicate"]) == 1


def test_non_convergence_partial_csv(tmp_path):
    out = tmp_path / "partial.csv"
    code = run_cli(["run", "--preset", "avf", "--problem", "kepler",
                    "--h", "50", "--steps", "5", "--out", out])
    assert code == 2
    lines = out.read_text().strip().splitlines()
    assert lines[-1].startswith("# error at step 1:")
    assert len(lines) == 3  # header, initial row, comment


def test_verlet_non_separable_is_config_error(tmp_path):
    assert run_cli(["run", "--method", "stormer_verlet", "--problem", "linear",
                    "--steps", "1", "--out", str(tmp_path / "x.csv")]) == 1


def test_linear_parameter_overrides(tmp_path):
    out = tmp_path / "sep.csv"
    code = run_cli(["run", "--method", "stormer_verlet", "--problem", "linear",
                    "--b", "0", "--steps", "10", "--out", out])
    assert code == 0
    # overrides are rejected for other problems
    assert run_cli(["run", "--preset", "avf", "--problem", "kepler", "--b", "0",
                    "--steps", "1", "--out", str(tmp_path / "x.csv")]) == 1


def test_custom_nodes_quadrature(tmp_path):
    out = tmp_path / "nodes.csv"
    code = run_cli(["run", "--preset", "avf", "--problem", "linear",
                    "--nodes", "0,0.5,1", "--steps", "10", "--out", out])
    assert code == 0
    _, data = read_csv(out)
    assert np.max(data[:, 3]) <= 1e-12  # Simpson is exact for the quartic integrand
    assert run_cli(["run", "--preset", "avf", "--problem", "linear",
                    "--quad", "2", "--nodes", "0,1", "--steps", "1",
                    "--out", str(tmp_path / "x.csv")]) == 1


def test_stdout_output(capsys):
    assert run_cli(["run", "--preset", "avf", "--problem", "linear",
                    "--steps", "2", "--out", "-"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0].startswith("t,p_1")
    assert len(lines) == 4
