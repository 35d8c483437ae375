import csv
import json
from pathlib import Path

import numpy as np
import pytest

from shockfree.cli import COMMANDS, EXIT_CONFIG, EXIT_HYPOTHESIS, build_parser, emit_csv, main

EXAMPLES = sorted((Path(__file__).resolve().parents[1] / "docs" / "examples").glob("*.toml"))
FAST = [p for p in EXAMPLES if p.stem not in ("classify_single_contact", "construct_two_contacts",
                                              "simulate_strip")]


def command_of(path):
    for line in path.read_text().splitlines():
        if line.startswith("command"):
            return line.split('"')[1]
    raise AssertionError(f"{path} has no command line")


def run(path, out, *extra):
    return main([command_of(path), "--config", str(path), "--out", str(out), *extra])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_examples_cover_every_command():
    assert {command_of(p) for p in EXAMPLES} == set(COMMANDS)


@pytest.mark.parametrize("path", EXAMPLES, ids=lambda p: p.stem)
def test_example_runs_cleanly(path, tmp_path, capsys):
    assert run(path, tmp_path) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["command"] == command_of(path)
    for name in summary.get("files", []):
        header, rows = read_csv(tmp_path / name)
        assert header and all(len(r) == len(header) for r in rows)
    assert json.loads(capsys.readouterr().out) == summary


@pytest.mark.parametrize("path", FAST, ids=lambda p: p.stem)
def test_outputs_are_byte_identical_across_runs(path, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(path, a) == 0 and run(path, b) == 0
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir())
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_missing_gamma_is_a_config_error(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text('command = "gas-eval"\n[gas]\nK = 1.0\n[scenario]\nz = [1.0]\nu = [0.0]\nm = [1.0]\n')
    assert main(["gas-eval", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "gas.gamma" in capsys.readouterr().err


def test_config_for_another_command_is_rejected(tmp_path):
    path = next(p for p in EXAMPLES if command_of(p) == "gas-eval")
    assert main(["reflect", "--config", str(path), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_construct_violation_reports_failed_checks(tmp_path):
    src = next(p for p in EXAMPLES if command_of(p) == "construct").read_text()
    cfg = tmp_path / "steep.toml"
    cfg.write_text(src.replace("Z1 = 0.97", "Z1 = 0.6"))
    out = tmp_path / "o"
    assert main(["construct", "--config", str(cfg), "--out", str(out)]) == EXIT_HYPOTHESIS
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] == "hypothesis-violated"
    assert "zeq" in summary["failed_checks"]
    header, rows = read_csv(out / "certificate.csv")
    failed = {r[0] for r in rows if r[header.index("ok")] == "false"}
    assert failed == set(summary["failed_checks"])


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    vals = rng.standard_normal((20, 3)) * 10.0 ** rng.integers(-12, 12, (20, 3))
    path = emit_csv(["a", "b", "c"], vals, tmp_path / "t.csv")
    header, rows = read_csv(path)
    assert header == ["a", "b", "c"]
    assert np.array_equal(np.array(rows, dtype=float), vals)
    assert b"\r" not in path.read_bytes()
    with pytest.raises(ValueError):
        emit_csv(["a"], [(1, 2)], tmp_path / "bad.csv")


def test_help_lists_all_commands(capsys):
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    assert len(COMMANDS) == 9
    for name in COMMANDS:
        assert name in text
