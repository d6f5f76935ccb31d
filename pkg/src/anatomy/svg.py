"""Minimal deterministic SVG emitters: line plots and heatmaps.

No plotting framework: output bytes depend only on the data, which keeps
figures diffable and the run manifests reproducible.
"""

from __future__ import annotations

import math
from pathlib import Path

_WIDTH, _HEIGHT = 720, 480
_MARGIN = 60.0
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#7f7f7f")

_MAX_HEATMAP_CELLS = 140


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, count: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def line_plot(path: str | Path, x, series: dict, *, xlabel: str, ylabel: str, title: str = "") -> None:
    """Write a polyline plot; ``series`` maps legend label to y-array."""
    xs = list(map(float, x))
    ys_all = [v for vals in series.values() for v in vals if math.isfinite(v)]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def to_px(xv, yv):
        px = _MARGIN + (xv - x_lo) / (x_hi - x_lo) * (_WIDTH - 2 * _MARGIN)
        py = _HEIGHT - _MARGIN - (yv - y_lo) / (y_hi - y_lo) * (_HEIGHT - 2 * _MARGIN)
        return px, py

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_WIDTH - 2 * _MARGIN}" '
        f'height="{_HEIGHT - 2 * _MARGIN}" fill="none" stroke="black"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH / 2}" y="30" text-anchor="middle" font-size="16">{title}</text>'
        )
    for tx in _ticks(x_lo, x_hi):
        px, _ = to_px(tx, y_lo)
        parts.append(f'<line x1="{_fmt(px)}" y1="{_HEIGHT - _MARGIN}" x2="{_fmt(px)}" y2="{_HEIGHT - _MARGIN + 5}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(px)}" y="{_HEIGHT - _MARGIN + 20}" text-anchor="middle" font-size="11">{tx:.3g}</text>')
    for ty in _ticks(y_lo, y_hi):
        _, py = to_px(x_lo, ty)
        parts.append(f'<line x1="{_MARGIN - 5}" y1="{_fmt(py)}" x2="{_MARGIN}" y2="{_fmt(py)}" stroke="black"/>')
        parts.append(f'<text x="{_MARGIN - 8}" y="{_fmt(py)}" text-anchor="end" font-size="11">{ty:.3g}</text>')
    parts.append(
        f'<text x="{_WIDTH / 2}" y="{_HEIGHT - 15}" text-anchor="middle" font-size="13">{xlabel}</text>'
    )
    parts.append(
        f'<text x="18" y="{_HEIGHT / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {_HEIGHT / 2})">{ylabel}</text>'
    )
    for k, (label, ys) in enumerate(series.items()):
        color = _COLORS[k % len(_COLORS)]
        pts = " ".join(
            f"{_fmt(px)},{_fmt(py)}"
            for px, py in (to_px(xv, yv) for xv, yv in zip(xs, ys) if math.isfinite(yv))
        )
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = _MARGIN + 16 + 16 * k
        parts.append(f'<line x1="{_WIDTH - _MARGIN - 90}" y1="{ly - 4}" x2="{_WIDTH - _MARGIN - 60}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{_WIDTH - _MARGIN - 54}" y="{ly}" font-size="12">{label}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def _diverging_color(v: float) -> str:
    """Blue-white-red map on [-1, 1]."""
    v = max(-1.0, min(1.0, v))
    if v >= 0:
        r, g, b = 255, round(255 * (1 - v)), round(255 * (1 - v))
    else:
        r, g, b = round(255 * (1 + v)), round(255 * (1 + v)), 255
    return f"rgb({r},{g},{b})"


def heatmap(path: str | Path, x, y, values, *, xlabel: str, ylabel: str, title: str = "") -> None:
    """Write a cell heatmap with a symmetric diverging color scale.

    The cell grid is strided down to a bounded number of cells so files stay
    a reasonable size; the CSV twin keeps full resolution.
    """
    import numpy as np

    values = np.asarray(values, dtype=float)
    ny, nx = values.shape
    stride = max(1, math.ceil(max(nx, ny) / _MAX_HEATMAP_CELLS))
    vv = values[::stride, ::stride]
    xv = np.asarray(x, dtype=float)[::stride]
    yv = np.asarray(y, dtype=float)[::stride]
    scale = float(np.abs(vv).max()) or 1.0

    plot_w, plot_h = _WIDTH - 2 * _MARGIN, _HEIGHT - 2 * _MARGIN
    cw, ch = plot_w / vv.shape[1], plot_h / vv.shape[0]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH / 2}" y="30" text-anchor="middle" font-size="16">{title}</text>'
        )
    for i in range(vv.shape[0]):
        py = _HEIGHT - _MARGIN - (i + 1) * ch
        for j in range(vv.shape[1]):
            px = _MARGIN + j * cw
            color = _diverging_color(vv[i, j] / scale)
            parts.append(
                f'<rect x="{_fmt(px)}" y="{_fmt(py)}" width="{_fmt(cw + 0.5)}" '
                f'height="{_fmt(ch + 0.5)}" fill="{color}"/>'
            )
    parts.append(
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>'
    )
    for label, px, py, anchor in (
        (f"{xv[0]:.3g}", _MARGIN, _HEIGHT - _MARGIN + 20, "middle"),
        (f"{xv[-1]:.3g}", _WIDTH - _MARGIN, _HEIGHT - _MARGIN + 20, "middle"),
        (f"{yv[0]:.3g}", _MARGIN - 8, _HEIGHT - _MARGIN, "end"),
        (f"{yv[-1]:.3g}", _MARGIN - 8, _MARGIN + 10, "end"),
    ):
        parts.append(f'<text x="{_fmt(px)}" y="{_fmt(py)}" text-anchor="{anchor}" font-size="11">{label}</text>')
    parts.append(
        f'<text x="{_WIDTH / 2}" y="{_HEIGHT - 15}" text-anchor="middle" font-size="13">{xlabel}</text>'
    )
    parts.append(
        f'<text x="18" y="{_HEIGHT / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {_HEIGHT / 2})">{ylabel}</text>'
    )
    parts.append(f'<text x="{_WIDTH - _MARGIN}" y="{_MARGIN - 8}" text-anchor="end" font-size="11">scale ±{scale:.3g}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
