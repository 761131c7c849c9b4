import csv
import json
import math
import shutil
import subprocess

import numpy as np
import pytest

from coherence_qsl.cli import main
from coherence_qsl.config import ConfigError, RunConfig, load_config, parse_angle, parse_rate
from coherence_qsl.dynamics import ConstantRate, OhmicZeroT


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.mark.parametrize(
    "token, value",
    [("pi/2", math.pi / 2), ("2pi/3", 2 * math.pi / 3), ("3*pi/4", 3 * math.pi / 4), ("pi", math.pi), ("0.7", 0.7)],
)
def test_parse_angle(token, value):
    assert parse_angle(token) == pytest.approx(value, rel=1e-15)


def test_parse_angle_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_angle("half a turn")


def test_parse_rate():
    assert parse_rate("const:2") == ConstantRate(2.0)
    assert parse_rate("ohmic:k=4,wc=1") == OhmicZeroT(4.0, 1.0)
    for bad in ("linear:3", "ohmic:k=4,foo=1", "const:x"):
        with pytest.raises(ConfigError):
            parse_rate(bad)


def test_run_config_validation():
    assert RunConfig(tau=0.5).n_steps == 2000
    assert RunConfig(tau=0.001).n_steps == 8
    for kwargs in ({"tau": 0.0}, {"channel": "teleport"}, {"steps": 3}, {"t0": -1.0}, {"format": "xml"}):
        with pytest.raises(ConfigError):
            RunConfig(**kwargs)


def test_config_file_with_override(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"channel": "damping", "theta": "pi/3", "tau": 0.25}))
    cfg = load_config(str(path), {"tau": 0.5, "theta": None})
    assert cfg.channel == "damping"
    assert cfg.theta == pytest.approx(math.pi / 3)
    assert cfg.tau == 0.5
    path.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(ConfigError):
        load_config(str(path), {})


def test_evolve_dephasing(tmp_path):
    out = tmp_path / "traj.csv"
    rc = main(["evolve", "--channel", "dephasing", "--theta", "pi/2", "--gamma", "const:2",
               "--omega0", "0", "--tau", "0.5", "--out", str(out)])
    assert rc == 0
    header, data = read_csv(out)
    assert header[0] == "t" and header[-1] == "gamma_cum"
    assert data.shape[0] == 2001
    assert math.hypot(data[-1, 3], data[-1, 4]) == pytest.approx(0.1839397, abs=1e-7)


def test_evolve_rejects_zero_tau(capsys):
    assert main(["evolve", "--tau", "0"]) == 2
    assert "tau" in capsys.readouterr().err


def test_evolve_unitary_keeps_populations(tmp_path):
    out = tmp_path / "u.csv"
    assert main(["evolve", "--channel", "unitary", "--omega0", "1.5", "--theta", "pi/3",
                 "--tau", "1", "--out", str(out)]) == 0
    _, data = read_csv(out)
    assert np.ptp(data[:, 1]) <= 1e-12
    assert np.ptp(data[:, 7]) <= 1e-12


def test_evolve_json(tmp_path):
    out = tmp_path / "traj.json"
    assert main(["evolve", "--tau", "0.1", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["t"]) == len(doc["states"]) == 401
    assert doc["config"]["steps"] == 400


def test_qsl_reports(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["qsl", "--theta", "pi/2", "--tau", "0.5", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["ratio"] == pytest.approx(1.0, abs=1e-4)
    assert "ratio=" in capsys.readouterr().out

    ratios = {}
    for theta in ("pi/2", "pi/4"):
        path = tmp_path / f"damp_{theta.replace('/', '_')}.json"
        assert main(["qsl", "--channel", "damping", "--theta", theta, "--tau", "0.5", "--out", str(path)]) == 0
        ratios[theta] = json.loads(path.read_text())["ratio"]
    assert ratios["pi/2"] < ratios["pi/4"]

    path = tmp_path / "third.json"
    assert main(["qsl", "--theta", "pi/3", "--tau", "0.5", "--out", str(path)]) == 0
    assert json.loads(path.read_text())["ratio"] < 1 - 1e-3


def test_qsl_stdout_csv(capsys):
    assert main(["qsl", "--tau", "0.25", "--format", "csv"]) == 0
    captured = capsys.readouterr()
    lines = captured.out.splitlines()
    assert lines[0].split(",")[:2] == ["delta_c", "path_length"]
    assert "tau_csl=" in captured.err


def test_determinism(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        assert main(["qsl", "--channel", "damping", "--theta", "1.1", "--tau", "0.7",
                     "--seed", "5", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_figure_all(tmp_path):
    assert main(["figure", "all", "--out", str(tmp_path)]) == 0
    for fig in ("fig2_left", "fig2_right", "fig3_left", "fig3_right"):
        header, data = read_csv(tmp_path / f"{fig}.csv")
        assert np.all(np.isfinite(data))
        assert header == (["tau", "ratio", "gamma_at_tau"] if fig.startswith("fig2") else ["theta", "tau", "tau_csl"])
    _, left = read_csv(tmp_path / "fig3_left.csv")
    blue = left[np.isclose(left[:, 0], math.pi / 2)]
    np.testing.assert_allclose(blue[:, 2], blue[:, 1], atol=1e-4)
    _, fig2 = read_csv(tmp_path / "fig2_left.csv")
    assert fig2[-1, 0] == pytest.approx(2.0) and fig2[-1, 1] < 1


def test_figure_single_and_bad(tmp_path):
    out = tmp_path / "f.csv"
    assert main(["figure", "fig2_left", "--out", str(out)]) == 0
    assert out.read_text().startswith("tau,ratio,gamma_at_tau\n")
    assert main(["figure", "fig9"]) == 2
    assert main(["figure"]) == 2


def test_verify_oracle(capsys):
    assert main(["verify", "oracle", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "[FAIL]" not in out and "checks passed" in out


def test_verify_bad_suite():
    assert main(["verify", "everything"]) == 2


def test_unknown_flag():
    assert main(["qsl", "--warp", "9"]) == 2


@pytest.mark.skipif(shutil.which("coherence-qsl") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["coherence-qsl", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("coherence-qsl ")
