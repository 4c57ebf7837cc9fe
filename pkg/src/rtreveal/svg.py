"""Standalone SVG line plots built from plain path and text elements."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
WIDTH, HEIGHT = 640, 420
MARGIN = (60, 20, 40, 50)  # left, right, top, bottom


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi <= lo:
        return np.array([lo])
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    return np.arange(np.ceil(lo / step) * step, hi + step * 1e-9, step)


def line_plot(series: Sequence[tuple[str, Sequence[float], Sequence[float]]], title: str = "",
              xlabel: str = "", ylabel: str = "", hline: float | None = None) -> str:
    """SVG text for labelled ``(name, xs, ys)`` series; non-finite points break the line."""
    left, right, top, bottom = MARGIN
    pw, ph = WIDTH - left - right, HEIGHT - top - bottom
    finite = [(np.asarray(x, float), np.asarray(y, float)) for _, x, y in series]
    xs = np.concatenate([x[np.isfinite(x) & np.isfinite(y)] for x, y in finite] or [np.zeros(1)])
    ys = np.concatenate([y[np.isfinite(x) & np.isfinite(y)] for x, y in finite] or [np.zeros(1)])
    if hline is not None:
        ys = np.r_[ys, hline]
    x0, x1 = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 1.0)
    y0, y1 = (float(ys.min()), float(ys.max())) if ys.size else (0.0, 1.0)
    if x1 <= x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 <= y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for v in _ticks(x0, x1):
        out.append(f'<line x1="{sx(v):.2f}" y1="{top + ph}" x2="{sx(v):.2f}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{sx(v):.2f}" y="{top + ph + 16}" text-anchor="middle">{v:.4g}</text>')
    for v in _ticks(y0, y1):
        out.append(f'<line x1="{left - 4}" y1="{sy(v):.2f}" x2="{left}" y2="{sy(v):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{sy(v) + 4:.2f}" text-anchor="end">{v:.4g}</text>')
    if hline is not None:
        out.append(f'<line x1="{left}" y1="{sy(hline):.2f}" x2="{left + pw}" y2="{sy(hline):.2f}" '
                   'stroke="#999" stroke-dasharray="4 3"/>')
    for k, ((name, _, _), (x, y)) in enumerate(zip(series, finite)):
        color = COLORS[k % len(COLORS)]
        ok = np.isfinite(x) & np.isfinite(y)
        cmds, pen = [], False
        for xv, yv, good in zip(x, y, ok):
            if not good:
                pen = False
                continue
            cmds.append(f'{"L" if pen else "M"}{sx(xv):.2f},{sy(yv):.2f}')
            pen = True
        out.append(f'<path d="{" ".join(cmds)}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = top + 14 + 14 * k
        out.append(f'<line x1="{left + pw - 110}" y1="{ly - 4}" x2="{left + pw - 90}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw - 86}" y="{ly}">{escape(name)}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="{top - 12}" text-anchor="middle" font-size="13">{escape(title)}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{top + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 14 {top + ph / 2})">{escape(ylabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_line_plot(path, series, **kwargs) -> None:
    Path(path).write_text(line_plot(series, **kwargs), encoding="utf-8")
