"""Report projections: JSON text, long-format CSV and a minimal SVG line chart."""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Sequence
from xml.sax.saxutils import escape, quoteattr

from .catalog import ExampleResult, Plot
from .serialize import dumps

PANEL_WIDTH = 640
PANEL_HEIGHT = 360
MARGIN = {"left": 70, "right": 170, "top": 36, "bottom": 44}
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#7f7f7f")


def render_json(result: ExampleResult) -> str:
    return dumps(result.to_dict())


def render_csv(result: ExampleResult) -> str:
    """One row per plotted point: plot, series, x, y."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["plot", "series", "x", "y"])
    for plot in result.plots:
        for s in plot.series:
            for x, y in zip(s.xs, s.ys):
                writer.writerow([plot.title, s.label, _fmt(x), _fmt(y)])
    return buf.getvalue()


def _fmt(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


def _usable(v: float, log: bool) -> bool:
    return math.isfinite(v) and (v > 0 or not log)


def _range(values: Sequence[float], log: bool) -> tuple[float, float]:
    vals = [math.log10(v) if log else v for v in values]
    if not vals:
        return 0.0, 1.0
    lo, hi = min(vals), max(vals)
    if hi - lo < 1e-12:
        pad = 1.0 if log or lo == 0 else 0.1 * abs(lo)
        return lo - pad, hi + pad
    return lo, hi


def _ticks(lo: float, hi: float, log: bool) -> list[tuple[float, str]]:
    if log:
        first, last = math.ceil(lo - 1e-9), math.floor(hi + 1e-9)
        step = max(1, math.ceil((last - first + 1) / 8))
        return [(float(k), f"1e{k}") for k in range(first, last + 1, step)]
    span = hi - lo
    raw = span / 5.0
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1.0, 2.0, 5.0, 10.0) if m * mag >= raw)
    start = math.ceil(lo / step) * step
    out = []
    k = 0
    while start + k * step <= hi + 1e-9 * step:
        v = start + k * step
        out.append((v, f"{v:.6g}"))
        k += 1
    return out


def _panel(plot: Plot, top: float) -> list[str]:
    x0, x1 = MARGIN["left"], PANEL_WIDTH - MARGIN["right"]
    y0, y1 = top + MARGIN["top"], top + PANEL_HEIGHT - MARGIN["bottom"]
    xs = [x for s in plot.series for x in s.xs if _usable(x, plot.log_x)]
    ys = [y for s in plot.series for y in s.ys if _usable(y, plot.log_y)]
    xlo, xhi = _range(xs, plot.log_x)
    ylo, yhi = _range(ys, plot.log_y)

    def px(x: float) -> float:
        v = math.log10(x) if plot.log_x else x
        return x0 + (v - xlo) / (xhi - xlo) * (x1 - x0)

    def py(y: float) -> float:
        v = math.log10(y) if plot.log_y else y
        return y1 - (v - ylo) / (yhi - ylo) * (y1 - y0)

    out = [
        '<g class="panel">',
        f'<text x="{x0}" y="{top + 22}" font-size="14">{escape(plot.title)}</text>',
        f'<line class="axis" x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black"/>',
        f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
    ]
    for v, label in _ticks(xlo, xhi, plot.log_x):
        x = x0 + (v - xlo) / (xhi - xlo) * (x1 - x0)
        out.append(f'<line x1="{x:.2f}" y1="{y1}" x2="{x:.2f}" y2="{y1 + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{y1 + 18}" font-size="10" text-anchor="middle">{escape(label)}</text>')
    for v, label in _ticks(ylo, yhi, plot.log_y):
        y = y1 - (v - ylo) / (yhi - ylo) * (y1 - y0)
        out.append(f'<line x1="{x0 - 5}" y1="{y:.2f}" x2="{x0}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{y + 3:.2f}" font-size="10" text-anchor="end">{escape(label)}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.2f}" y="{y1 + 36}" font-size="11" text-anchor="middle">{escape(plot.x_label)}</text>')
    out.append(
        f'<text x="16" y="{(y0 + y1) / 2:.2f}" font-size="11" text-anchor="middle" '
        f'transform="rotate(-90 16 {(y0 + y1) / 2:.2f})">{escape(plot.y_label)}</text>'
    )
    for i, s in enumerate(plot.series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(
            f"{px(x):.2f},{py(y):.2f}"
            for x, y in zip(s.xs, s.ys)
            if _usable(x, plot.log_x) and _usable(y, plot.log_y)
        )
        out.append(
            f'<polyline class="trajectory" data-series={quoteattr(s.label)} fill="none" stroke="{color}" '
            f'stroke-width="1.5" points="{pts}"/>'
        )
        ly = y0 + 14 * i
        out.append(f'<line x1="{x1 + 12}" y1="{ly}" x2="{x1 + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{x1 + 34}" y="{ly + 4}" font-size="10">{escape(s.label)}</text>')
    out.append("</g>")
    return out


def render_svg(result: ExampleResult) -> str:
    """Stacked line charts, one polyline per series; log axes where the plot asks for them."""
    plots = result.plots
    height = PANEL_HEIGHT * max(len(plots), 1)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_WIDTH}" height="{height}" '
        f'viewBox="0 0 {PANEL_WIDTH} {height}">',
        f"<title>{escape(result.id)}</title>",
    ]
    if not plots:
        lines.append(f'<text x="20" y="40" font-size="14">{escape(result.id)}: no trajectories to plot</text>')
    for k, plot in enumerate(plots):
        lines.extend(_panel(plot, k * PANEL_HEIGHT))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


RENDERERS = {"json": render_json, "csv": render_csv, "svg": render_svg}
