"""Command-line entry points.

Exit code contract: 0 on success, 2 on usage or configuration problems,
3 when a simulation itself fails at runtime. Diagnostics go to stderr and
honor NO_COLOR.
"""
from __future__ import annotations

import dataclasses
import os
import sys
from pathlib import Path
from typing import Optional

import click
import yaml

from .engine import run_scenario, run_sweep
from .errors import (
    CompositionAmbiguityError,
    ConfigError,
    SimulationDivergenceError,
)
from .output import (
    format_number,
    write_run_manifest,
    write_sweep_summary_csv,
    write_timeseries_csv,
)
from .scenario import parse_scenario, parse_scenario_with_warnings
from .svgplot import default_plot_kinds, emit_fault_signature_plots
from .version import VERSION

EXIT_CONFIG = 2
EXIT_RUNTIME = 3

_MAX_SEED = 2**64 - 1


def _want_color() -> bool:
    if os.environ.get("NO_COLOR"):
        return False
    return sys.stderr.isatty()


def _fail(code: int, message: str) -> None:
    click.secho(f"error: {message}", err=True,
                fg="red" if _want_color() else None)
    sys.exit(code)


def _warn(message: str) -> None:
    click.secho(f"warning: {message}", err=True,
                fg="yellow" if _want_color() else None)


def _read_scenario(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        _fail(EXIT_CONFIG, f"cannot read scenario {path}: {exc.strerror or exc}")
        raise AssertionError("unreachable")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(VERSION, prog_name="conflictsim")
def main() -> None:
    """Simulate observation, interpretation, and action conflicts between
    an automated controller and a human supervisor under injected faults."""


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(path_type=Path), help="Scenario YAML file.")
@click.option("--strict", is_flag=True,
              help="Reject unknown keys instead of warning.")
def validate(scenario_path: Path, strict: bool) -> None:
    """Check a scenario file and report its shape."""
    text = _read_scenario(scenario_path)
    try:
        config, warnings = parse_scenario_with_warnings(text, strict=strict)
    except ConfigError as exc:
        _fail(EXIT_CONFIG, f"invalid scenario: {exc}")
        return
    for message in warnings:
        _warn(message)
    click.echo(
        f"OK: {config.process.n} variable(s), {config.process.actuators} "
        f"actuator(s), {config.clock.steps} step(s), "
        f"{len(config.faults)} fault(s), seed {config.clock.seed}"
    )


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(path_type=Path), help="Scenario YAML file.")
@click.option("--out", "output_dir", required=True,
              type=click.Path(path_type=Path), help="Output directory.")
@click.option("--seed", type=click.IntRange(0, _MAX_SEED), default=None,
              help="Override the scenario seed.")
def run(scenario_path: Path, output_dir: Path, seed: Optional[int]) -> None:
    """Run one scenario; write timeseries.csv and run_manifest.json."""
    text = _read_scenario(scenario_path)
    try:
        config = parse_scenario(text)
        result = run_scenario(config, seed_override=seed)
    except (ConfigError, CompositionAmbiguityError) as exc:
        _fail(EXIT_CONFIG, f"invalid scenario: {exc}")
        return
    except SimulationDivergenceError as exc:
        _fail(EXIT_RUNTIME,
              f"simulation failed at step {exc.step} "
              f"(t={format_number(exc.t)}): {exc}")
        return

    output_dir.mkdir(parents=True, exist_ok=True)
    csv_path = output_dir / "timeseries.csv"
    manifest_path = output_dir / "run_manifest.json"
    write_timeseries_csv(result.records, csv_path)
    write_run_manifest(config, result.seed, seed is not None, manifest_path)

    peak = result.peak_sample
    click.echo(f"peak R = {format_number(peak.r)} "
               f"(grade: {peak.grade.value}) at t = {format_number(peak.t)}")
    click.echo(f"wrote {csv_path} and {manifest_path}")


def _parse_sweep_spec(spec: str) -> tuple[str, list]:
    path, sep, rest = spec.partition("=")
    path = path.strip()
    if not sep or not path:
        raise ConfigError(
            "sweep spec must look like <param.path>=<v1,v2,...>"
        )
    tokens = [tok.strip() for tok in rest.split(",") if tok.strip()]
    if not tokens:
        raise ConfigError("sweep value list is empty")
    values = []
    for tok in tokens:
        try:
            values.append(yaml.safe_load(tok))
        except yaml.YAMLError:
            values.append(tok)
    return path, values


def _value_dirname(value) -> str:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        text = str(value)
    else:
        text = format_number(value)
    return "value_" + text.replace(os.sep, "_")


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(path_type=Path), help="Scenario YAML file.")
@click.option("--param", "sweep_spec", required=True,
              help="Swept parameter, e.g. faults.0.params.delta=0,1,2")
@click.option("--out", "output_dir", required=True,
              type=click.Path(path_type=Path), help="Output directory.")
@click.option("--seed", type=click.IntRange(0, _MAX_SEED), default=None,
              help="Override the base seed the per-run seeds derive from.")
def sweep(scenario_path: Path, sweep_spec: str, output_dir: Path,
          seed: Optional[int]) -> None:
    """Run a scenario once per value of one parameter; write summary.csv."""
    text = _read_scenario(scenario_path)
    try:
        param_path, values = _parse_sweep_spec(sweep_spec)
        config = parse_scenario(text)
        if seed is not None:
            config = dataclasses.replace(
                config, clock=dataclasses.replace(config.clock, seed=seed)
            )
        names = [_value_dirname(v) for v in values]
        if len(set(names)) != len(names):
            raise ConfigError(f"sweep values are not distinct: {values}")
        points = run_sweep(config, param_path, values)
    except (ConfigError, CompositionAmbiguityError) as exc:
        _fail(EXIT_CONFIG, f"invalid sweep: {exc}")
        return
    except SimulationDivergenceError as exc:
        _fail(EXIT_RUNTIME,
              f"simulation failed at step {exc.step} "
              f"(t={format_number(exc.t)}): {exc}")
        return

    output_dir.mkdir(parents=True, exist_ok=True)
    for point in points:
        run_dir = output_dir / _value_dirname(point.value)
        run_dir.mkdir(parents=True, exist_ok=True)
        write_timeseries_csv(point.result.records, run_dir / "timeseries.csv")
        write_run_manifest(point.config, point.seed, False,
                           run_dir / "run_manifest.json")
    summary_path = output_dir / "summary.csv"
    write_sweep_summary_csv(points, summary_path)

    for point in points:
        peak = point.result.peak_sample
        click.echo(
            f"{param_path} = {point.value}: peak R = {format_number(peak.r)} "
            f"(grade: {peak.grade.value})"
        )
    click.echo(f"wrote {summary_path}")


@main.command()
@click.option("--kinds", default="all", show_default=True,
              help="Comma-separated fault kinds, or 'all'.")
@click.option("--out", "output_dir", required=True,
              type=click.Path(path_type=Path), help="Output directory.")
def plot(kinds: str, output_dir: Path) -> None:
    """Render the observation-difference signature of each fault kind."""
    catalog = default_plot_kinds()
    if kinds.strip() == "all":
        selected = catalog
    else:
        selected = {}
        for name in (tok.strip() for tok in kinds.split(",")):
            if not name:
                continue
            if name not in catalog:
                _fail(EXIT_CONFIG,
                      f"unknown fault kind {name!r}; valid kinds: "
                      + ", ".join(sorted(catalog)))
            selected[name] = catalog[name]
        if not selected:
            _fail(EXIT_CONFIG, "no fault kinds selected")
    paths = emit_fault_signature_plots(selected, output_dir)
    for path in paths:
        click.echo(f"wrote {path}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True,
              type=click.IntRange(1, 65535))
def serve(host: str, port: int) -> None:
    """Serve the HTTP API."""
    import uvicorn

    uvicorn.run("conflictsim.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
