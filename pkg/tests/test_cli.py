"""Command-line interface behaviour via click's test runner."""
import json

import pytest
from click.testing import CliRunner

from conflictsim.cli import main

GOOD = """
clock: {dt: 0.1, duration: 10.0, seed: 7}
process: {gain: 1.0, time_constant: 4.0, initial_values: [0.0]}
pid: {kp: 1.0, setpoint: 0.5}
faults:
  - {kind: bias, channel: ai_sensor_fault, variable: 0, t0: 2.0,
     params: {delta: 0.3}}
"""

BAD_WINDOW = GOOD.replace("t0: 2.0,", "t0: 2.0, t_end: 1.0,")

DIVERGENT = """
clock: {dt: 0.5, duration: 100.0}
process: {gain: 1.0e+308, time_constant: 1.0, initial_values: [0.0]}
pid: {kp: 1.0, setpoint: 1.0}
"""


@pytest.fixture()
def runner():
    return CliRunner()


def write(tmp_path, text, name="scenario.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_validate_ok(runner, tmp_path):
    result = runner.invoke(main, ["validate", "--scenario", write(tmp_path, GOOD)])
    assert result.exit_code == 0
    assert "OK" in result.output
    assert "1 variable(s)" in result.output
    assert "seed 7" in result.output


def test_validate_bad_window_exits_2(runner, tmp_path):
    result = runner.invoke(main, ["validate", "--scenario", write(tmp_path, BAD_WINDOW)])
    assert result.exit_code == 2
    assert "faults[0]" in result.output


def test_validate_missing_file_exits_2(runner, tmp_path):
    result = runner.invoke(main, ["validate", "--scenario", str(tmp_path / "nope.yaml")])
    assert result.exit_code == 2
    assert "error" in result.output


def test_validate_strict_rejects_unknown_key(runner, tmp_path):
    text = GOOD + "pudding: 1\n"
    loose = runner.invoke(main, ["validate", "--scenario", write(tmp_path, text)])
    assert loose.exit_code == 0
    assert "unknown key" in loose.output
    strict = runner.invoke(
        main, ["validate", "--strict", "--scenario", write(tmp_path, text)])
    assert strict.exit_code == 2


def test_run_writes_artifacts(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(main, [
        "run", "--scenario", write(tmp_path, GOOD), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert (out / "timeseries.csv").exists()
    assert (out / "run_manifest.json").exists()
    assert "peak R" in result.output
    manifest = json.loads((out / "run_manifest.json").read_text())
    assert manifest["seed"] == 7
    assert manifest["seed_overridden"] is False


def test_run_twice_is_byte_identical(runner, tmp_path):
    scenario = write(tmp_path, GOOD)
    out1 = tmp_path / "one"
    out2 = tmp_path / "two"
    assert runner.invoke(main, ["run", "--scenario", scenario, "--out", str(out1)]).exit_code == 0
    assert runner.invoke(main, ["run", "--scenario", scenario, "--out", str(out2)]).exit_code == 0
    assert (out1 / "timeseries.csv").read_bytes() == (out2 / "timeseries.csv").read_bytes()
    assert (out1 / "run_manifest.json").read_bytes() == (out2 / "run_manifest.json").read_bytes()


def test_run_seed_override_lands_in_manifest(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(main, [
        "run", "--scenario", write(tmp_path, GOOD),
        "--out", str(out), "--seed", "42"])
    assert result.exit_code == 0
    manifest = json.loads((out / "run_manifest.json").read_text())
    assert manifest["seed"] == 42
    assert manifest["seed_overridden"] is True


def test_run_divergence_exits_3(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(main, [
        "run", "--scenario", write(tmp_path, DIVERGENT), "--out", str(out)])
    assert result.exit_code == 3
    assert "step" in result.output


def test_sweep_layout(runner, tmp_path):
    out = tmp_path / "sweep"
    result = runner.invoke(main, [
        "sweep", "--scenario", write(tmp_path, GOOD),
        "--param", "faults.0.params.delta=1.0,0.0,0.5",
        "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert (out / "summary.csv").exists()
    subdirs = sorted(p.name for p in out.iterdir() if p.is_dir())
    assert subdirs == ["value_0", "value_0.5", "value_1"]
    for sub in subdirs:
        assert (out / sub / "timeseries.csv").exists()
        assert (out / sub / "run_manifest.json").exists()
    summary = (out / "summary.csv").read_text().strip().split("\n")
    assert summary[0] == "value,peak_d_vod,peak_r,grade"
    values = [row.split(",")[0] for row in summary[1:]]
    assert values == ["0", "0.5", "1"]
    # swept delta shows up directly as the peak observation distance
    peaks = [row.split(",")[1] for row in summary[1:]]
    assert peaks == ["0", "0.5", "1"]


def test_sweep_bad_param_exits_2(runner, tmp_path):
    result = runner.invoke(main, [
        "sweep", "--scenario", write(tmp_path, GOOD),
        "--param", "faults.0.params.oops=1.0",
        "--out", str(tmp_path / "s")])
    assert result.exit_code == 2


def test_sweep_empty_values_exits_2(runner, tmp_path):
    result = runner.invoke(main, [
        "sweep", "--scenario", write(tmp_path, GOOD),
        "--param", "faults.0.params.delta=",
        "--out", str(tmp_path / "s")])
    assert result.exit_code == 2


def test_plot_all_kinds(runner, tmp_path):
    out = tmp_path / "plots"
    result = runner.invoke(main, ["plot", "--out", str(out)])
    assert result.exit_code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == [
        "vod_bias.svg", "vod_cyclic.svg", "vod_delay.svg", "vod_drift.svg",
        "vod_open_circuit.svg", "vod_short_circuit.svg", "vod_stuck.svg",
    ]


def test_plot_single_kind(runner, tmp_path):
    out = tmp_path / "plots"
    result = runner.invoke(main, ["plot", "--kinds", "bias", "--out", str(out)])
    assert result.exit_code == 0
    assert [p.name for p in out.iterdir()] == ["vod_bias.svg"]


def test_plot_unknown_kind_exits_2(runner, tmp_path):
    result = runner.invoke(main, [
        "plot", "--kinds", "nosuchfault", "--out", str(tmp_path / "p")])
    assert result.exit_code == 2
    assert "valid kinds" in result.output


def test_no_color_leaves_output_plain(runner, tmp_path, monkeypatch):
    monkeypatch.setenv("NO_COLOR", "1")
    result = runner.invoke(main, ["validate", "--scenario", write(tmp_path, BAD_WINDOW)])
    assert result.exit_code == 2
    assert "\x1b" not in result.output


def test_help_lists_subcommands(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for sub in ("validate", "run", "sweep", "plot", "serve"):
        assert sub in result.output
