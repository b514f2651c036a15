import json

import numpy as np
import pandas as pd
import pytest

from fluxmech.cli import main as cli
from fluxmech.cli.commands import response as response_command
from fluxmech.cli.commands import simulate as simulate_command
from fluxmech.core.exceptions import IntegrationError
from fluxmech.models.state import IntegrationStats, Trajectory

RESONANT = """\
drive:
  eps0_phi_e0: -0.1
  delta_gap: 0.1
qubit:
  gamma1: 0.01
  gamma2: 0.01
mech:
  omega_m: 0.1414213562373095
  gamma_m: 0.002
  g: 0.011
"""

DAMPING_MAP = """\
drive:
  eps0_phi_e0: 0.0
  delta_gap: 0.1
qubit:
  gamma1: 0.014
  gamma2: 0.714
mech:
  omega_m: 0.128
  quality_factor: 100000.0
  g: 0.0018
"""


@pytest.fixture
def write_config(tmp_path):
    def write(text: str, name: str = "run.yaml"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def _manifest(out_dir, command):
    paths = sorted(out_dir.glob(f"{command}-*.manifest.json"))
    assert len(paths) == 1
    return paths[0], json.loads(paths[0].read_text())


def _map(config, out_dir, *extra):
    return cli.main(["map", "--config", config, "--output-dir", str(out_dir), "--phi0-count", "41", "--phi1-count", "21", *extra])


def test_map_writes_tile_sidecar_and_manifest(tmp_path, write_config):
    out = tmp_path / "out"
    assert _map(write_config(DAMPING_MAP), out) == 0
    _, manifest = _manifest(out, "map")
    assert manifest["status"] == "ok"
    assert len(manifest["config_hash"]) == 64
    csv_name, sidecar_name = manifest["outputs"]
    frame = pd.read_csv(out / csv_name)
    assert len(frame) == 41 * 21
    assert json.loads((out / sidecar_name).read_text())["csv"] == csv_name


def test_manifest_replay_is_byte_identical(tmp_path, write_config):
    first, second = tmp_path / "first", tmp_path / "second"
    assert _map(write_config(DAMPING_MAP), first) == 0
    manifest_path, manifest = _manifest(first, "map")
    assert cli.main(["map", "--config", str(manifest_path), "--output-dir", str(second)]) == 0
    _, replayed = _manifest(second, "map")
    assert replayed["config_hash"] == manifest["config_hash"]
    csv_name = manifest["outputs"][0]
    assert (second / csv_name).read_bytes() == (first / csv_name).read_bytes()


@pytest.mark.parametrize(
    "command, extra",
    [
        ("simulate", ["--t-end", "100", "--sample-dt", "1"]),
        ("response", ["--omega-count", "40"]),
        ("bifurcate", ["--g-min", "0.005", "--g-max", "0.02", "--g-count", "3", "--no-cycles"]),
    ],
)
def test_every_command_replays_byte_identically(tmp_path, write_config, command, extra):
    first, second = tmp_path / "first", tmp_path / "second"
    assert cli.main([command, "--config", write_config(RESONANT), "--output-dir", str(first), *extra]) == 0
    manifest_path, manifest = _manifest(first, command)
    assert cli.main([command, "--config", str(manifest_path), "--output-dir", str(second)]) == 0
    _, replayed = _manifest(second, command)
    assert replayed["config_hash"] == manifest["config_hash"]
    for name in manifest["outputs"]:
        assert (second / name).read_bytes() == (first / name).read_bytes()


def test_worker_count_does_not_change_output(tmp_path, write_config):
    config = write_config(DAMPING_MAP)
    assert _map(config, tmp_path / "w1", "--workers", "1") == 0
    assert _map(config, tmp_path / "w3", "--workers", "3") == 0
    _, manifest = _manifest(tmp_path / "w1", "map")
    csv_name = manifest["outputs"][0]
    assert (tmp_path / "w1" / csv_name).read_bytes() == (tmp_path / "w3" / csv_name).read_bytes()


def test_simulate_writes_trajectory(tmp_path, write_config):
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", write_config(RESONANT), "--output-dir", str(out), "--t-end", "200", "--sample-dt", "0.5"]) == 0
    _, manifest = _manifest(out, "simulate")
    assert manifest["config"]["run"]["t_end"] == 200.0
    assert manifest["summary"]["n_accepted"] > 0
    frame = pd.read_csv(out / manifest["outputs"][0])
    assert list(frame.columns) == ["t", "re_s_minus", "im_s_minus", "s_z", "re_alpha", "im_alpha"]
    assert len(frame) == 401


def test_simulate_failure_keeps_partial_output(tmp_path, write_config, monkeypatch):
    times = np.array([0.0, 0.5, 1.0])
    partial = Trajectory(times, np.zeros((3, 5)), IntegrationStats("DOP853", 1e-9, 1e-12, 3, 0, 20), partial=True)

    def failing(*args, **kwargs):
        raise IntegrationError("non-finite state at t=1", partial=partial, t_fail=1.0)

    monkeypatch.setattr(simulate_command, "integrate", failing)
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", write_config(RESONANT), "--output-dir", str(out)]) == 3
    _, manifest = _manifest(out, "simulate")
    assert manifest["status"] == "failed"
    assert manifest["summary"]["t_fail"] == 1.0
    assert manifest["outputs"][0].endswith("-partial.csv")
    assert len(pd.read_csv(out / manifest["outputs"][0])) == 3


def test_response_curves_and_surface(tmp_path, write_config):
    config = write_config(RESONANT)
    curves_dir, surface_dir = tmp_path / "curves", tmp_path / "surface"
    assert cli.main(["response", "--config", config, "--output-dir", str(curves_dir), "--omega-count", "50", "--preset", "long_coherence"]) == 0
    _, manifest = _manifest(curves_dir, "response")
    assert manifest["config"]["qubit"]["gamma1"] == 0.001
    assert len(pd.read_csv(curves_dir / manifest["outputs"][0])) == 50

    args = ["--delta-min", "-0.2", "--delta-max", "0.2", "--delta-count", "5", "--omega-count", "30"]
    assert cli.main(["response", "--config", config, "--output-dir", str(surface_dir), *args]) == 0
    _, manifest = _manifest(surface_dir, "response")
    frame = pd.read_csv(surface_dir / manifest["outputs"][0])
    assert len(frame) == 150
    assert sorted(frame["delta"].unique()) == pytest.approx([-0.2, -0.1, 0.0, 0.1, 0.2])


def test_bifurcate_reports_threshold(tmp_path, write_config):
    out = tmp_path / "out"
    args = ["--g-min", "0.005", "--g-max", "0.02", "--g-count", "4", "--no-cycles"]
    assert cli.main(["bifurcate", "--config", write_config(RESONANT), "--output-dir", str(out), *args]) == 0
    _, manifest = _manifest(out, "bifurcate")
    branch_name, threshold_name = manifest["outputs"]
    threshold = json.loads((out / threshold_name).read_text())
    assert threshold["g_c_numeric"] == pytest.approx(threshold["g_crit_analytic"], rel=0.05)
    branch = pd.read_csv(out / branch_name)
    assert branch["stable"].tolist() == [1, 1, 0, 0]


def test_selftest_single_check(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["selftest", "--quick", "--only", "1", "--output-dir", str(out)]) == 0
    _, manifest = _manifest(out, "selftest")
    assert manifest["status"] == "ok"
    assert manifest["config"] == {"version": manifest["version"], "quick": True, "only": [1]}
    (report_name,) = manifest["outputs"]
    assert report_name == f"selftest-report-{manifest['config_hash'][:12]}.json"
    report = json.loads((out / report_name).read_text())
    assert report["passed"]
    assert report["config_hash"] == manifest["config_hash"]
    assert [c["number"] for c in report["criteria"]] == [1]
    assert "PASS" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv, code",
    [
        (["simulate"], 2),
        (["simulate", "--config", "{config}", "--set", "qubit.gamma1=-1"], 2),
        (["simulate", "--config", "{config}", "--set", "mech.omega_m=0"], 2),
        (["map", "--config", "{missing}"], 4),
    ],
)
def test_exit_codes(tmp_path, write_config, argv, code):
    config = write_config(RESONANT)
    argv = [a.format(config=config, missing=str(tmp_path / "missing.yaml")) for a in argv]
    assert cli.main([*argv, "--output-dir", str(tmp_path / "out")]) == code


def test_unwritable_output_dir(tmp_path, write_config):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert _map(write_config(DAMPING_MAP), blocker) == 4


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["--version"])
    assert info.value.code == 0
    assert "fluxmech" in capsys.readouterr().out


@pytest.mark.parametrize(
    "flags, expected",
    [([], None), (["--oracle"], response_command.ORACLE_POINTS), (["--oracle-points", "4"], 4)],
)
def test_response_oracle_flags(flags, expected):
    args = cli.build_parser().parse_args(["response", "--config", "run.yaml", *flags])
    assert args.oracle_points == expected
