"""Hand-rolled SVG 1.1 line plots, used for fault signature galleries.

No plotting library in sight: a polyline, two axes with ticks, a title.
Output is plain text, deterministic, and viewable in any browser.
"""
from __future__ import annotations

import math
from pathlib import Path
from random import Random
from typing import Callable, Optional, Sequence, Union

from .errors import ConfigError
from .faults import (
    Bias,
    Cyclic,
    Delay,
    Drift,
    FaultKind,
    OpenCircuit,
    SensorRange,
    ShortCircuit,
    Stuck,
    vod_signature,
)

_WIDTH = 640
_HEIGHT = 400
_MARGIN_LEFT = 64
_MARGIN_RIGHT = 20
_MARGIN_TOP = 44
_MARGIN_BOTTOM = 52
_TICKS = 5


def _ticks(lo: float, hi: float) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (_TICKS - 1) for i in range(_TICKS)]


def render_line_svg(
    series: Sequence[tuple[float, float]],
    title: str,
    x_label: str = "time (s)",
    y_label: str = "VOD",
) -> str:
    """One polyline over labeled axes, as a complete SVG document."""
    if len(series) < 2:
        raise ValueError("need at least two points to draw a line")
    xs = [p[0] for p in series]
    ys = [p[1] for p in series]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if y_hi == y_lo:
        # flat trace: open up a band so the line sits mid-plot
        pad = 1.0 if y_hi == 0 else abs(y_hi) * 0.5
        y_lo, y_hi = y_lo - pad, y_hi + pad
    else:
        pad = (y_hi - y_lo) * 0.08
        y_lo, y_hi = y_lo - pad, y_hi + pad
    if x_hi == x_lo:
        x_hi = x_lo + 1.0

    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(x: float) -> float:
        return _MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return _MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in series)
    x_axis_y = _HEIGHT - _MARGIN_BOTTOM
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<line x1="{_MARGIN_LEFT}" y1="{x_axis_y}" '
        f'x2="{_WIDTH - _MARGIN_RIGHT}" y2="{x_axis_y}" stroke="black"/>',
        f'<line x1="{_MARGIN_LEFT}" y1="{_MARGIN_TOP}" '
        f'x2="{_MARGIN_LEFT}" y2="{x_axis_y}" stroke="black"/>',
    ]
    for tick in _ticks(x_lo, x_hi):
        px = sx(tick)
        parts.append(
            f'<line x1="{px:.2f}" y1="{x_axis_y}" x2="{px:.2f}" '
            f'y2="{x_axis_y + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{x_axis_y + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tick:.4g}</text>'
        )
    for tick in _ticks(y_lo, y_hi):
        py = sy(tick)
        parts.append(
            f'<line x1="{_MARGIN_LEFT - 5}" y1="{py:.2f}" '
            f'x2="{_MARGIN_LEFT}" y2="{py:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_LEFT - 8}" y="{py + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{tick:.4g}</text>'
        )
    parts.append(
        f'<text x="{(_MARGIN_LEFT + _WIDTH - _MARGIN_RIGHT) / 2:.0f}" '
        f'y="{_HEIGHT - 12}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12">{x_label}</text>'
    )
    parts.append(
        f'<text x="16" y="{(_MARGIN_TOP + x_axis_y) / 2:.0f}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {(_MARGIN_TOP + x_axis_y) / 2:.0f})">'
        f'{y_label}</text>'
    )
    parts.append(
        f'<polyline points="{points}" fill="none" stroke="#1965b0" '
        f'stroke-width="1.5"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def default_plot_kinds() -> dict[str, FaultKind]:
    """One representative instance of each fault kind, tuned so all seven
    signature shapes read clearly at the default horizon."""
    return {
        "open_circuit": OpenCircuit(),
        "short_circuit": ShortCircuit(),
        "stuck": Stuck(),
        "bias": Bias(delta=1.0),
        "cyclic": Cyclic(amplitude=1.0, period=20.0),
        "drift": Drift(slope=0.05),
        "delay": Delay(tau=30.0, error_amplitude=1.0),
    }


def _default_baseline(t: float) -> float:
    # gentle swing so stuck and delay traces differ visibly from bias
    return 1.0 + 0.5 * math.sin(2.0 * math.pi * t / 160.0)


def emit_fault_signature_plots(
    kinds: dict[str, FaultKind],
    destination: Path,
    *,
    t0: float = 100.0,
    horizon: float = 200.0,
    dt: float = 0.2,
    baseline: Union[float, Callable[[float], float], None] = None,
    sensor_range: SensorRange = SensorRange(-10.0, 10.0),
    rng: Optional[Random] = None,
) -> list[Path]:
    """Render one observation-difference plot per fault kind.

    Returns the written file paths, one vod_<kind>.svg per entry, in the
    order given.
    """
    if not kinds:
        raise ConfigError("no fault kinds selected to plot")
    base = _default_baseline if baseline is None else baseline
    out_dir = Path(destination)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for name, kind in kinds.items():
        series = vod_signature(
            kind, horizon=horizon, t0=t0, dt=dt,
            baseline=base, sensor_range=sensor_range, rng=rng,
        )
        svg = render_line_svg(
            series,
            title=f"Observation difference under {name.replace('_', ' ')}",
        )
        path = out_dir / f"vod_{name}.svg"
        path.write_text(svg, encoding="utf-8")
        written.append(path)
    return written
