"""Tests for the zeno-ctl command line."""

import csv
import json
import math

import pytest

from zeno_ctl import cli
from zeno_ctl.cli import LANDSCAPE_COLUMNS, SWEEP_COLUMNS, TRAJECTORY_COLUMNS, main
from zeno_ctl.errors import ExitCode, NumericalError


def write(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


@pytest.fixture
def ad_south(tmp_path):
    return write(tmp_path, {
        "preset": {"name": "amplitude_damping", "mu": 1.0},
        "psi0": {"alpha": math.pi},
        "control": {"optimal": True},
    })


def test_rate_with_optimal_control(tmp_path, ad_south):
    out = tmp_path / "rate.json"
    assert main(["rate", "--config", ad_south, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["gamma_free"] == pytest.approx(1.0, abs=1e-12)
    assert report["gamma_controlled"] == pytest.approx(0.375, abs=1e-12)
    assert report["kappa"] == pytest.approx(0.375, abs=1e-12)
    assert set(report["finite_tau"]) == {"tau", "t", "p_tau", "gamma_eff", "survival_total"}
    assert report["finite_tau"]["tau"] == 0.01


def test_rate_free_pole_has_no_decay(tmp_path, capsys):
    cfg = write(tmp_path, {"preset": {"name": "dephasing", "mu": 1.0}, "psi0": [1, 0]})
    assert main(["rate", "-c", cfg]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["gamma_free"] == 0.0
    assert "gamma_controlled" not in report
    assert report["finite_tau"]["p_tau"] == pytest.approx(1.0)


def test_rate_exit_codes(tmp_path):
    non_markovian = write(tmp_path, {"gamma": [[1, 0, 0], [0, -1, 0], [0, 0, 0]], "psi0": [1, 0]}, "a.json")
    assert main(["rate", "--config", non_markovian]) == 3
    irrational = write(tmp_path, {
        "dimension": 3,
        "channels": [{"rate": 1.0, "v": [[0, 1, 0], [0, 0, 0], [0, 0, 0]]}],
        "psi0": [0, 1, 0],
        "control": {"hc": [[0, 0, 0], [0, 1, 0], [0, 0, math.sqrt(2)]]},
    }, "b.json")
    assert main(["rate", "--config", irrational]) == 4
    assert main(["rate", "--config", str(tmp_path / "missing.json")]) == 2
    assert main(["rate"]) == 2
    no_state = write(tmp_path, {"preset": {"name": "dephasing"}}, "c.json")
    assert main(["rate", "--config", no_state]) == 2


def test_rate_reports_null_rate_when_survival_underflows(tmp_path, capsys, monkeypatch):
    cfg = write(tmp_path, {
        "preset": {"name": "amplitude_damping", "mu": 1.0},
        "psi0": {"alpha": math.pi},
        "tau": 1000.0,
        "t": 5000.0,
    })
    monkeypatch.setattr(cli, "survival_probability", lambda model, psi0, tau: 0.0)
    assert main(["rate", "-c", cfg]) == 0
    finite = json.loads(capsys.readouterr().out)["finite_tau"]
    assert finite["p_tau"] == 0.0
    assert finite["gamma_eff"] is None
    assert finite["survival_total"] == 0.0


def test_runtime_errors_have_their_own_exit_code(tmp_path, ad_south, monkeypatch):
    def fails(cfg):
        raise NumericalError("expm did not converge")

    monkeypatch.setattr(cli, "cmd_rate", fails)
    assert main(["rate", "-c", ad_south]) == ExitCode.RUNTIME == 5

    def crashes(cfg):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "cmd_rate", crashes)
    assert main(["rate", "-c", ad_south]) == ExitCode.RUNTIME


def test_sweep_alpha(tmp_path, ad_south, monkeypatch):
    monkeypatch.setenv("ZENO_CTL_THREADS", "2")
    out = tmp_path / "sweep.csv"
    assert main(["sweep-alpha", "--config", ad_south, "--points", "5", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == list(SWEEP_COLUMNS)
    assert len(rows) == 5
    assert [float(r["alpha"]) for r in rows] == pytest.approx([k * math.pi / 4 for k in range(5)])
    assert rows[0]["kappa"] == "nan"
    for row in rows[1:]:
        assert float(row["kappa"]) == pytest.approx(0.375, abs=1e-12)
    assert float(rows[-1]["gamma_free"]) == pytest.approx(1.0)


def test_sweep_alpha_single_point(tmp_path, ad_south):
    out = tmp_path / "sweep.csv"
    assert main(["sweep-alpha", "--config", ad_south, "-n", "1", "-o", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 1
    assert float(rows[0]["alpha"]) == 0.0


def test_sweep_alpha_needs_preset(tmp_path):
    cfg = write(tmp_path, {"gamma": [[0, 0, 0], [0, 0, 0], [0, 0, 1]]})
    assert main(["sweep-alpha", "--config", cfg]) == 2


def test_landscape(tmp_path, ad_south):
    out = tmp_path / "landscape.csv"
    assert main(["landscape", "--config", ad_south, "--points", "5", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == list(LANDSCAPE_COLUMNS)
    assert len(rows) == 5 * 10
    assert sorted({float(r["theta"]) for r in rows}) == pytest.approx([k * math.pi / 4 for k in range(5)])
    assert sorted({float(r["phi"]) for r in rows}) == pytest.approx([k * math.pi / 5 for k in range(10)])
    rates = [float(r["gamma_controlled"]) for r in rows]
    # south pole, amplitude damping: the optimum 3/8 mu sits on the theta = pi/2 row
    assert min(rates) == pytest.approx(0.375, abs=1e-12)
    best = rows[rates.index(min(rates))]
    assert float(best["theta"]) == pytest.approx(math.pi / 2)


def test_landscape_needs_a_qubit(tmp_path):
    cfg = write(tmp_path, {
        "dimension": 3,
        "channels": [{"rate": 1.0, "v": [[0, 1, 0], [0, 0, 0], [0, 0, 0]]}],
        "psi0": [0, 1, 0],
    })
    assert main(["landscape", "--config", cfg]) == 2
    assert main(["landscape", "--config", cfg, "-n", "1"]) == 2


def test_fidelity(tmp_path):
    cfg = write(tmp_path, {"preset": {"name": "dephasing", "mu": 1.0}, "t": 2.0})
    out = tmp_path / "fidelity.csv"
    assert main(["fidelity", "--config", cfg, "--points", "5", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 5
    assert float(rows[0]["F_free"]) == 1.0
    assert float(rows[-1]["t"]) == 2.0
    for row in rows[1:]:
        assert float(row["F_opt"]) > float(row["F_free"])


def test_fidelity_prefers_config_grid(tmp_path):
    cfg = write(tmp_path, {
        "preset": {"name": "amplitude_damping"},
        "t_grid": {"start": 0.0, "stop": 1.0, "num": 3},
    })
    out = tmp_path / "fidelity.csv"
    assert main(["fidelity", "--config", cfg, "--out", str(out)]) == 0
    assert [float(r["t"]) for r in read_csv(out)] == [0.0, 0.5, 1.0]


def test_trajectory(tmp_path):
    cfg = write(tmp_path, {
        "preset": {"name": "dephasing", "mu": 1.0},
        "psi0": {"alpha": math.pi / 2, "beta": 0.0},
        "control": {"theta": math.pi / 2, "phi": math.pi / 2},
        "tau": 0.05,
    })
    out = tmp_path / "trajectory.csv"
    assert main(["trajectory", "--config", cfg, "--steps", "4", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == list(TRAJECTORY_COLUMNS)
    assert [r["segment"] for r in rows] == ["actual"] * 5 + ["continued"] * 4 + ["free"] * 5
    assert [int(r["step"]) for r in rows[5:9]] == [5, 6, 7, 8]
    actual_end, free_end = rows[4], rows[-1]
    assert float(actual_end["cumulative_survival"]) > float(free_end["cumulative_survival"])


def test_verify_selected_checks(capsys):
    assert main(["verify", "--check", "printed-branch-correction", "--check", "frame-identity"]) == 0
    table = capsys.readouterr().out
    assert "printed-branch-correction" in table
    assert "PASS" in table
    assert "FAIL" not in table


def test_verify_unknown_check():
    assert main(["verify", "--check", "no-such-check"]) == 2
