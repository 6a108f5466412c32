import json
import subprocess
import sys

import pytest

from fieldlab import cli
from fieldlab.io import read_table
from fieldlab.scenarios import REGISTRY

SCENARIOS = [
    "spin-packet",
    "small-packet-trend",
    "charge-velocity",
    "gordon-closure",
    "photon-goodwf",
    "photon-covariance",
    "energy-identity",
    "self-energy",
    "fock-demo",
    "dirac-sea",
    "fock-functional-map",
    "haag-overlap",
    "grassmann-demo",
]


def test_registry_covers_every_scenario():
    assert list(REGISTRY) == SCENARIOS


def test_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert [line.split()[0] for line in out] == SCENARIOS


def test_run_writes_artifacts(tmp_path, capsys):
    assert cli.main(["run", "haag-overlap", "--out", str(tmp_path)]) == 0
    target = tmp_path / "haag-overlap"
    for name in ("results.csv", "checks.csv", "overlap.csv", "run.json", "summary.txt", "plot.png"):
        assert (target / name).is_file(), name
    meta = json.loads((target / "run.json").read_text())
    assert meta["config"]["seed"] == 20240611
    assert meta["config"]["params"]["max_modes"] == 16
    assert meta["passed"] is True
    header, rows = read_table(target / "overlap.csv")
    assert header == ["M", "overlap", "log_overlap"]
    overlaps = [float(r[1]) for r in rows]
    assert len(overlaps) == 16 and all(b < a for a, b in zip(overlaps, overlaps[1:]))
    assert "result: PASS" in capsys.readouterr().out


def test_run_with_yaml_config(tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(f"params:\n  mass2: 1.0\nseed: 9\nout: {tmp_path / 'o'}\n")
    assert cli.main(["run", "haag-overlap", "--config", str(cfg), "--no-plots"]) == 0
    meta = json.loads((tmp_path / "o" / "haag-overlap" / "run.json").read_text())
    assert meta["config"]["seed"] == 9
    assert meta["config"]["params"]["mass2"] == 1.0
    assert not (tmp_path / "o" / "haag-overlap" / "plot.png").exists()


def test_zero_boost_covariance(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"params": {"velocity": 0.0, "speeds": [0.0]}}))
    assert cli.main(["run", "photon-covariance", "--config", str(cfg), "--out", str(tmp_path), "--no-plots"]) == 0
    _, rows = read_table(tmp_path / "photon-covariance" / "results.csv")
    values = dict(rows)
    assert float(values["photon_mismatch_max"]) == 0
    assert float(values["dirac_mismatch_max"]) == 0


def test_failed_check_gives_exit_one(tmp_path):
    cfg = tmp_path / "cfg.json"
    # a 0.99 R^2 floor passes, an impossible one fails
    cfg.write_text(json.dumps({"params": {"min_r_squared": 1.5}}))
    assert cli.main(["run", "haag-overlap", "--config", str(cfg), "--out", str(tmp_path), "--no-plots"]) == 1
    _, rows = read_table(tmp_path / "haag-overlap" / "checks.csv")
    assert any(r[1] == "false" for r in rows)


@pytest.mark.parametrize(
    "content",
    [
        {"colour": "red"},
        {"params": {"nonsense": 1}},
        {"scenario": "dirac-sea"},
        {"constants": {"m": 0}},
        {"seed": -4},
    ],
)
def test_invalid_config_exit_two(tmp_path, content, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(content))
    assert cli.main(["run", "haag-overlap", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_unknown_scenario_and_missing_config(tmp_path, capsys):
    assert cli.main(["run", "warp-drive", "--out", str(tmp_path)]) == 2
    assert cli.main(["run", "dirac-sea", "--config", str(tmp_path / "none.json")]) == 2
    capsys.readouterr()


def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["run", "dirac-sea", "--out", str(blocker / "sub")]) == 2
    assert "output directory" in capsys.readouterr().err


def test_bad_seed_rejected(capsys):
    with pytest.raises(SystemExit):
        cli.main(["run", "dirac-sea", "--seed", str(2**64)])
    capsys.readouterr()


def test_seed_determinism_and_sensitivity(tmp_path):
    for name, seed in (("a", "5"), ("b", "5"), ("c", "6")):
        assert cli.main(["run", "fock-demo", "--seed", seed, "--out", str(tmp_path / name), "--no-plots"]) == 0
    files = ["results.csv", "checks.csv", "algebra.csv", "run.json", "summary.txt"]
    read = lambda d, f: (tmp_path / d / "fock-demo" / f).read_bytes()  # noqa: E731
    assert all(read("a", f) == read("b", f) for f in files)
    assert read("a", "run.json") != read("c", "run.json")


def test_parallel_matches_sequential(tmp_path):
    names = ["dirac-sea", "grassmann-demo"]
    assert cli.main(["run", *names, "--out", str(tmp_path / "s"), "--no-plots"]) == 0
    assert cli.main(["run", *names, "--parallel", "--out", str(tmp_path / "p"), "--no-plots"]) == 0
    for n in names:
        for f in ("results.csv", "checks.csv", "run.json"):
            assert (tmp_path / "s" / n / f).read_bytes() == (tmp_path / "p" / n / f).read_bytes()


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fieldlab.cli", "list"], capture_output=True, text=True, check=True)
    assert "haag-overlap" in proc.stdout
