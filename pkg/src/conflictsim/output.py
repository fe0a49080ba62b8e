"""Run artifacts: the timeseries CSV, the run manifest, and sweep summaries.

Everything here is deterministic. Numbers are printed with nine significant
digits, negative zero is normalized away, rows end with a bare linefeed, and
the manifest carries no timestamps, so rerunning the same scenario with the
same seed reproduces each artifact byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

from .scenario import ScenarioConfig, serialize_scenario
from .version import VERSION

if TYPE_CHECKING:
    from .engine import SweepPoint, TimeSeriesRecord

TOOL_NAME = "conflictsim"


def format_number(value: float) -> str:
    """Nine significant digits; -0.0 collapses to 0."""
    if value == 0.0:
        value = 0.0
    return f"{value:.9g}"


def timeseries_header(n: int, p: int) -> list[str]:
    header = ["t"]
    header += [f"x_N_{i}" for i in range(n)]
    header += [f"x_A_{i}" for i in range(n)]
    header += [f"x_H_{i}" for i in range(n)]
    header += [f"u_A_{j}" for j in range(p)]
    header += [f"u_H_{j}" for j in range(p)]
    header += ["d_vod", "d_vid", "d_vad", "P", "S", "R", "grade"]
    return header


def render_timeseries_csv(records: Sequence["TimeSeriesRecord"]) -> str:
    """The full timeseries as CSV text."""
    if not records:
        raise ValueError("no records to write")
    n = len(records[0].x_n)
    p = len(records[0].u_a)
    header = timeseries_header(n, p)
    width = len(header)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for rec in records:
        s = rec.sample
        row = [format_number(s.t)]
        row += [format_number(v) for v in rec.x_n]
        row += [format_number(v) for v in rec.x_a]
        row += [format_number(v) for v in rec.x_h]
        row += [format_number(v) for v in rec.u_a]
        row += [format_number(v) for v in rec.u_h]
        row += [format_number(s.d_vod), format_number(s.d_vid),
                format_number(s.d_vad), format_number(s.p),
                format_number(s.s), format_number(s.r), s.grade.value]
        if len(row) != width:
            raise ValueError(
                f"row width {len(row)} does not match header width {width}"
            )
        writer.writerow(row)
    return buffer.getvalue()


def write_timeseries_csv(
    records: Sequence["TimeSeriesRecord"], destination: Path
) -> int:
    """Write the timeseries CSV; returns the byte count written.

    Refuses an empty record list before touching the filesystem.
    """
    text = render_timeseries_csv(records)
    data = text.encode("utf-8")
    Path(destination).write_bytes(data)
    return len(data)


def manifest_mapping(
    config: ScenarioConfig, seed: int, seed_overridden: bool
) -> dict:
    """Everything needed to reproduce a run, and nothing volatile."""
    return {
        "tool": TOOL_NAME,
        "version": VERSION,
        "seed": seed,
        "seed_overridden": seed_overridden,
        "scenario": serialize_scenario(config),
    }


def render_manifest(
    config: ScenarioConfig, seed: int, seed_overridden: bool
) -> str:
    return json.dumps(
        manifest_mapping(config, seed, seed_overridden),
        indent=2, sort_keys=True,
    ) + "\n"


def write_run_manifest(
    config: ScenarioConfig, seed: int, seed_overridden: bool, destination: Path
) -> int:
    data = render_manifest(config, seed, seed_overridden).encode("utf-8")
    Path(destination).write_bytes(data)
    return len(data)


def render_sweep_summary_csv(points: Sequence["SweepPoint"]) -> str:
    """Sweep results, one row per swept value, ascending."""
    if not points:
        raise ValueError("no sweep points to write")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["value", "peak_d_vod", "peak_r", "grade"])
    for point in points:
        value = point.value
        cell = format_number(value) if isinstance(value, (int, float)) \
            and not isinstance(value, bool) else str(value)
        peak = point.result.peak_sample
        writer.writerow([
            cell,
            format_number(point.result.peak_d_vod),
            format_number(peak.r),
            peak.grade.value,
        ])
    return buffer.getvalue()


def write_sweep_summary_csv(
    points: Sequence["SweepPoint"], destination: Path
) -> int:
    data = render_sweep_summary_csv(points).encode("utf-8")
    Path(destination).write_bytes(data)
    return len(data)
