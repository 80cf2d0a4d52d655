import csv
import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from herdlab import ParseError, ValidationError
from herdlab.cli import load_scenario, main, parse_scenario, run

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def _write(tmp_path, text, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def _read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_minimal_flow_config(tmp_path):
    path = _write(tmp_path, "{mode: circular, k:1, R:2, omega:1, evaders:[[0.5,0]]}\n")
    cfg = load_scenario(path)
    assert cfg.params.kappa == 0.5
    assert cfg.params.k == 1 and cfg.params.R == 2 and cfg.params.omega == 1
    assert cfg.integrator.t_end > 0


def test_reindex_notice():
    cfg = parse_scenario({"mode": "circular", "k": 1, "R": 2, "omega": 1,
                          "evaders": [[0.1, 0.0], [0.0, 0.9], [0.3, 0.0]]})
    assert cfg.evaders[0] == (0.0, 0.9)
    assert cfg.params.kappa == 0.9
    assert any("re-indexed" in n for n in cfg.notices)


def test_omega_zero_rejected():
    with pytest.raises(ValidationError) as info:
        parse_scenario({"mode": "circular", "k": 1, "R": 2, "omega": 0, "evaders": [[0.5, 0]]})
    assert info.value.field == "omega"
    assert info.value.reason == "must be > 0"


@pytest.mark.parametrize("extra", [{"colour": 1}, {"integrator": {"t_end": 1, "stepz": 1}}])
def test_unknown_keys_rejected(extra):
    base = {"mode": "circular", "k": 1, "R": 2, "omega": 1, "evaders": [[0.5, 0]]}
    base.update(extra)
    with pytest.raises(ValidationError):
        parse_scenario(base)


def test_kappa_mismatch_rejected():
    with pytest.raises(ValidationError):
        parse_scenario({"k": 1, "k1": 1, "R": 2, "omega": 2, "kappa": 0.8,
                        "evaders": [[1.0, 0.0]]})


def test_exponent_floats_in_yaml(tmp_path):
    path = _write(tmp_path, "mode: circular\nk: 1\nR: 2\nomega: 1\nevaders: [[0.5, 0]]\n"
                            "integrator: {t_end: 5, method: rk45, rel_tol: 1e-9}\n")
    assert load_scenario(path).integrator.rel_tol == 1e-9


def test_parse_error_location(tmp_path):
    path = _write(tmp_path, "mode: circular\nk: 1\nevaders: [[0.5, 0]\n")
    with pytest.raises(ParseError) as info:
        load_scenario(path)
    assert info.value.line is not None and info.value.line >= 3


def test_simulate_csv(tmp_path):
    cfg = load_scenario(SCENARIOS / "spiral_two_evaders.yaml")
    report = run("simulate", cfg, tmp_path)
    assert report.exit_code == 0
    header, data = _read_csv(tmp_path / "trajectory.csv")
    assert header == ["t", "x_p", "y_p", "x_e0", "y_e0", "r_e0", "psi_e0",
                      "x_e1", "y_e1", "r_e1", "psi_e1"]
    assert data.shape[1] == 3 + 4 * cfg.n
    dt = np.diff(data[:, 0])
    assert np.all(dt > 0)
    assert np.allclose(dt[:-1], cfg.integrator.record_every, rtol=1e-9)
    assert dt[-1] <= cfg.integrator.record_every * (1 + 1e-9)


def test_simulate_spiral_single(tmp_path):
    report = run("simulate", load_scenario(SCENARIOS / "spiral_single.yaml"), tmp_path)
    r0 = report.results["final_state"]["r_psi"][0]
    assert abs(r0 - 0.4458) < 1e-3
    saved = json.loads((tmp_path / "simulate_report.json").read_text())
    assert saved["results"]["convergence"]["converged"]


def test_equilibria_json(tmp_path):
    report = run("equilibria", load_scenario(SCENARIOS / "circular_equilibria.yaml"), tmp_path)
    saved = json.loads((tmp_path / "equilibria_report.json").read_text())
    assert abs(saved["results"]["r_s2"]["r_star"] - 0.2541) < 5e-4
    assert saved["results"] == json.loads(json.dumps(report.results))
    text = (tmp_path / "equilibria_report.json").read_text()
    assert text == json.dumps(saved, sort_keys=True, indent=2) + "\n"


def test_singular_exit_code(tmp_path, capsys):
    code = main(["simulate", "--config", str(SCENARIOS / "singular_start.yaml"),
                 "--out-dir", str(tmp_path)])
    assert code == 2
    saved = json.loads((tmp_path / "simulate_report.json").read_text())
    assert saved["results"]["termination"] == "singular"
    assert saved["exit_code"] == 2
    assert (tmp_path / "trajectory.csv").exists()


def test_usage_errors_exit_one(tmp_path, capsys):
    bad = _write(tmp_path, "{mode: circular, k:1, R:2, omega:0, evaders:[[0.5,0]]}\n")
    assert main(["simulate", "--config", str(bad), "--out-dir", str(tmp_path)]) == 1
    assert json.loads((tmp_path / "simulate_report.json").read_text())["exit_code"] == 1
    with pytest.raises(SystemExit) as info:
        main(["nonsense", "--config", str(bad)])
    assert info.value.code == 1


def test_round_trip_bit_identical(tmp_path):
    first = tmp_path / "a"
    run("simulate", load_scenario(SCENARIOS / "circular_three_evaders.yaml"), first)
    again = tmp_path / "b"
    report_path = first / "simulate_report.json"
    code = main(["simulate", "--config", str(report_path), "--out-dir", str(again)])
    assert code == 0
    assert (first / "trajectory.csv").read_bytes() == (again / "trajectory.csv").read_bytes()
    a = json.loads(report_path.read_text())
    b = json.loads((again / "simulate_report.json").read_text())
    assert a["config_hash"] == b["config_hash"]


def test_threads_env_override(tmp_path, monkeypatch):
    from herdlab._parallel import resolve_threads
    monkeypatch.setenv("HERDLAB_THREADS", "3")
    assert resolve_threads(1) == 3
    monkeypatch.setenv("HERDLAB_THREADS", "zero")
    with pytest.raises(ValidationError):
        resolve_threads(1)


def test_polyline_output(tmp_path):
    cfg = parse_scenario({"mode": "circular", "k": 1, "R": 2, "omega": 1,
                          "evaders": [[0.25, 0.0]], "roa": {"samples": 64}})
    report = run("roa", cfg, tmp_path)
    assert report.exit_code == 0
    polys = [p for p in report.artifacts if p.endswith(".csv")]
    assert polys
    with open(tmp_path / polys[0]) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "id"
    first = np.array([r[1:] for r in rows[1:] if r[0] == rows[1][0]], dtype=float)
    assert len(first) > 3
    assert np.array_equal(first[0], first[-1])


def test_console_script(tmp_path):
    out = subprocess.run([sys.executable, "-m", "herdlab.cli", "equilibria", "--config",
                          str(SCENARIOS / "circular_equilibria.yaml"), "--out-dir",
                          str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert json.loads(out.stdout)["status"] == "ok"


def _commands(path):
    text = path.read_text()
    for line in text.splitlines():
        if line.startswith("# command:"):
            return line.split(":", 1)[1].split()
    return ["simulate"]


@pytest.mark.slow
@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.yaml")), ids=lambda p: p.stem)
def test_shipped_scenarios_run(path, tmp_path):
    expected = 2 if path.stem == "singular_start" else 0
    for command in _commands(path):
        t0 = time.perf_counter()
        code = main([command, "--config", str(path), "--out-dir", str(tmp_path),
                     "--threads", "1"])
        assert time.perf_counter() - t0 < 60.0
        assert code == expected
