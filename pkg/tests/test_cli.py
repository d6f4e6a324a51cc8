"""End-to-end command line behavior: artifacts, determinism, exit codes."""

import hashlib
import json
import subprocess
import sys

import pytest

from risknet import load_register
from risknet.cli import main
from risknet.pipeline import StageError

ANALYZE_FILES = {
    "similarity.csv",
    "network_edges.csv",
    "network.graphml",
    "partition.csv",
    "validation.json",
    "cascade_summary.csv",
    "horizon.csv",
    "horizon.json",
    "horizon.md",
    "liability.csv",
    "liability.json",
    "emerging_risks.csv",
}


def _synth(path, seed=7, modules=2, risks=4):
    return main(
        [
            "synth",
            "--out",
            str(path),
            "--modules",
            str(modules),
            "--risks-per-module",
            str(risks),
            "--tags-per-module",
            "3",
            "--firms",
            "2",
            "--seed",
            str(seed),
        ]
    )


def _analyze_args(register_path, out_dir, seed=3):
    return [
        "analyze",
        "--input",
        str(register_path),
        "--out",
        str(out_dir),
        "--ensemble-size",
        "8",
        "--cascade-runs",
        "8",
        "--restarts",
        "2",
        "--seed",
        str(seed),
    ]


def test_synth_round_trip_and_determinism(tmp_path, capsys):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    assert _synth(first) == 0
    assert _synth(second) == 0
    assert first.read_bytes() == second.read_bytes()
    register = load_register(first)
    assert register.n == 8
    assert len(register.firms) == 2
    err = capsys.readouterr().err
    assert "[risknet] synth: wrote 8 risks" in err


def test_analyze_writes_expected_artifacts(tmp_path, capsys):
    register_path = tmp_path / "register.csv"
    _synth(register_path)
    out = tmp_path / "out"
    assert main(_analyze_args(register_path, out)) == 0
    names = {p.name for p in out.iterdir()}
    assert ANALYZE_FILES | {"manifest.json"} <= names

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 3
    assert manifest["measure"] == "cosine"
    assert set(manifest["files"]) == ANALYZE_FILES
    for name, digest in manifest["files"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest

    captured = capsys.readouterr()
    assert captured.out == ""  # analyze reports only on stderr
    assert "[risknet] analyze:" in captured.err


def test_analyze_repeat_runs_are_identical(tmp_path):
    register_path = tmp_path / "register.csv"
    _synth(register_path)
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    assert main(_analyze_args(register_path, out1)) == 0
    assert main(_analyze_args(register_path, out2)) == 0
    for name in sorted(ANALYZE_FILES | {"manifest.json"}):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_cascade_prints_mean_to_stdout(tmp_path, capsys):
    register_path = tmp_path / "register.csv"
    _synth(register_path)
    code = main(
        [
            "cascade",
            "--input",
            str(register_path),
            "--risk",
            "1",
            "--ensemble-size",
            "6",
            "--cascade-runs",
            "10",
            "--seed",
            "2",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    value = float(out.strip())
    assert 0.0 <= value <= 7.0


def test_robustness_writes_reports(tmp_path):
    register_path = tmp_path / "register.csv"
    _synth(register_path)
    out = tmp_path / "rob"
    code = main(
        [
            "robustness",
            "--input",
            str(register_path),
            "--out",
            str(out),
            "--measures",
            "dice,lancewilliams",
            "--ensemble-size",
            "8",
            "--cascade-runs",
            "8",
            "--restarts",
            "2",
            "--seed",
            "1",
        ]
    )
    assert code == 0
    names = {p.name for p in out.iterdir()}
    assert names == {
        "robustness_mismatch.csv",
        "robustness_module_match.csv",
        "robustness_sensitivity.csv",
        "robustness.json",
        "manifest.json",
    }
    payload = json.loads((out / "robustness.json").read_text())
    rows = {row["measure"]: row for row in payload["outcomes"]}
    assert set(rows) == {"cosine", "dice", "lancewilliams"}
    assert rows["dice"]["match_fraction"] == rows["lancewilliams"]["match_fraction"]


def test_missing_input_exits_one(tmp_path, capsys):
    code = main(_analyze_args(tmp_path / "absent.csv", tmp_path / "out"))
    assert code == 1
    assert "input error" in capsys.readouterr().err


def test_bad_flag_values_exit_one(tmp_path, capsys):
    register_path = tmp_path / "register.csv"
    _synth(register_path)
    base = _analyze_args(register_path, tmp_path / "out")
    assert main(base + ["--measure", "hamming"]) == 1
    assert main(base + ["--ensemble-size", "0"]) == 1
    assert main(["frobnicate", "--seed", "1"]) == 1
    assert main(["analyze", "--seed", "1"]) == 1  # --input is required
    err = capsys.readouterr().err
    assert "error" in err


def test_unknown_risk_id_exits_one(tmp_path, capsys):
    register_path = tmp_path / "register.csv"
    _synth(register_path)
    code = main(
        [
            "cascade",
            "--input",
            str(register_path),
            "--risk",
            "99",
            "--seed",
            "0",
        ]
    )
    assert code == 1
    assert "unknown risk_id 99" in capsys.readouterr().err


def test_stage_failure_exits_two(tmp_path, capsys, monkeypatch):
    register_path = tmp_path / "register.csv"
    _synth(register_path)

    def boom(*args, **kwargs):
        raise RuntimeError("synthetic fault")

    monkeypatch.setattr("risknet.pipeline.validate", boom)
    code = main(_analyze_args(register_path, tmp_path / "out"))
    assert code == 2
    err = capsys.readouterr().err
    assert "stage 'validation' failed: synthetic fault" in err


def test_module_invocation_help():
    result = subprocess.run(
        [sys.executable, "-m", "risknet.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert "analyze" in result.stdout
    assert "robustness" in result.stdout


def test_console_script_help():
    script = subprocess.run(
        ["risknet", "synth", "--help"], capture_output=True, text=True
    )
    if script.returncode == 127:
        pytest.skip("console script not on PATH")
    assert script.returncode == 0
    assert "--risks-per-module" in script.stdout
