"""Minimal self-contained SVG line plots (no plotting library needed)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 720, 440
LEFT, RIGHT, TOP, BOTTOM = 80, 20, 40, 60
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str
    color: str | None = None
    dashed: bool = False


def _nice_ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _fmt(v):
    return f"{v:.4g}"


def line_plot(path, series, title="", xlabel="", ylabel="", markers=(), hline=None, max_points=2000):
    """Write ``series`` as polylines. ``markers`` are (x, y, text) annotations;
    ``hline`` draws a thin horizontal reference line (e.g. J = 0)."""
    xs = np.concatenate([np.asarray(s.x, float) for s in series])
    ys = np.concatenate([np.asarray(s.y, float)[np.isfinite(s.y)] for s in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if hline is not None:
        y0, y1 = min(y0, hline), max(y1, hline)
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0 or 1.0) * pw

    def py(y):
        return TOP + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{TOP - 14}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="18" y="{TOP + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 18 {TOP + ph / 2})">{escape(ylabel)}</text>',
    ]
    for t in _nice_ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{TOP + ph}" x2="{X:.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{TOP + ph + 18}" text-anchor="middle">{_fmt(t)}</text>')
    for t in _nice_ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{LEFT - 5}" y1="{Y:.2f}" x2="{LEFT}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{Y + 4:.2f}" text-anchor="end">{_fmt(t)}</text>')
    if hline is not None:
        Y = py(hline)
        out.append(f'<line x1="{LEFT}" y1="{Y:.2f}" x2="{LEFT + pw}" y2="{Y:.2f}" stroke="#888" stroke-width="0.8"/>')
    for i, s in enumerate(series):
        color = s.color or COLORS[i % len(COLORS)]
        x = np.asarray(s.x, float)
        y = np.asarray(s.y, float)
        step = max(1, x.size // max_points)
        pts, runs = [], []
        for xv, yv in zip(x[::step], y[::step]):
            if np.isfinite(yv):
                pts.append(f"{px(xv):.2f},{py(yv):.2f}")
            elif pts:
                runs.append(pts)
                pts = []
        if pts:
            runs.append(pts)
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        for run in runs:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.4"{dash} points="{" ".join(run)}"/>')
        ly = TOP + 16 + 16 * i
        out.append(f'<line x1="{LEFT + pw - 150}" y1="{ly}" x2="{LEFT + pw - 125}" y2="{ly}" stroke="{color}"{dash}/>')
        out.append(f'<text x="{LEFT + pw - 120}" y="{ly + 4}">{escape(s.label)}</text>')
    for mx, my, text in markers:
        if x0 <= mx <= x1:
            out.append(f'<circle cx="{px(mx):.2f}" cy="{py(my):.2f}" r="3" fill="none" stroke="black"/>')
            if text:
                out.append(f'<text x="{px(mx) + 4:.2f}" y="{py(my) + 14:.2f}" font-size="10">{escape(text)}</text>')
    out.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
