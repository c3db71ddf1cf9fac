"""Minimal log-log line plots written as standalone SVG."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
MARKERS = ["square", "circle", "diamond", "triangle"]


def _decades(lo: float, hi: float) -> list[int]:
    return list(range(math.floor(lo), math.ceil(hi) + 1))


def _marker(kind: str, x: float, y: float, color: str) -> str:
    r = 4
    if kind == "square":
        return f'<rect x="{x - r:.1f}" y="{y - r:.1f}" width="{2 * r}" height="{2 * r}" fill="none" stroke="{color}"/>'
    if kind == "diamond":
        pts = f"{x},{y - r} {x + r},{y} {x},{y + r} {x - r},{y}"
        return f'<polygon points="{pts}" fill="none" stroke="{color}"/>'
    if kind == "triangle":
        pts = f"{x},{y - r} {x + r},{y + r} {x - r},{y + r}"
        return f'<polygon points="{pts}" fill="none" stroke="{color}"/>'
    return f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{r}" fill="none" stroke="{color}"/>'


def loglog_svg(series: dict[str, tuple], xlabel: str, ylabel: str, title: str = "",
               width: int = 560, height: int = 420) -> str:
    """Render ``{label: (x, y)}`` on log-log axes with decade grid lines."""
    pts = [(np.asarray(x, float), np.asarray(y, float)) for x, y in series.values()]
    pts = [(x[(x > 0) & (y > 0)], y[(x > 0) & (y > 0)]) for x, y in pts]
    allx = np.concatenate([x for x, _ in pts]) if pts else np.array([1.0])
    ally = np.concatenate([y for _, y in pts]) if pts else np.array([1.0])
    if allx.size == 0:
        allx, ally = np.array([1.0]), np.array([1.0])
    lx0, lx1 = np.log10(allx.min()), np.log10(allx.max())
    ly0, ly1 = np.log10(ally.min()), np.log10(ally.max())
    lx0, lx1 = (lx0 - 0.5, lx1 + 0.5) if lx1 - lx0 < 1e-9 else (lx0 - 0.05 * (lx1 - lx0), lx1 + 0.05 * (lx1 - lx0))
    ly0, ly1 = (ly0 - 0.5, ly1 + 0.5) if ly1 - ly0 < 1e-9 else (ly0 - 0.05 * (ly1 - ly0), ly1 + 0.05 * (ly1 - ly0))
    ml, mr, mt, mb = 70, 20, 40, 55
    pw, ph = width - ml - mr, height - mt - mb

    def sx(v):
        return ml + (np.log10(v) - lx0) / (lx1 - lx0) * pw

    def sy(v):
        return mt + (ly1 - np.log10(v)) / (ly1 - ly0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="12">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for d in _decades(lx0, lx1):
        if lx0 <= d <= lx1:
            x = sx(10.0**d)
            out.append(f'<line x1="{x:.1f}" y1="{mt}" x2="{x:.1f}" y2="{mt + ph}" stroke="#ddd"/>')
            out.append(f'<text x="{x:.1f}" y="{mt + ph + 16}" text-anchor="middle">1e{d}</text>')
    for d in _decades(ly0, ly1):
        if ly0 <= d <= ly1:
            y = sy(10.0**d)
            out.append(f'<line x1="{ml}" y1="{y:.1f}" x2="{ml + pw}" y2="{y:.1f}" stroke="#ddd"/>')
            out.append(f'<text x="{ml - 6}" y="{y + 4:.1f}" text-anchor="end">1e{d}</text>')
    for i, ((label, _), (x, y)) in enumerate(zip(series.items(), pts)):
        color, mk = COLORS[i % len(COLORS)], MARKERS[i % len(MARKERS)]
        if x.size:
            path = " ".join(f"{sx(a):.1f},{sy(b):.1f}" for a, b in zip(x, y))
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-dasharray="5,3"/>')
            out.extend(_marker(mk, sx(a), sy(b), color) for a, b in zip(x, y))
        ly = mt + 14 + 16 * i
        out.append(_marker(mk, ml + pw - 120, ly - 4, color))
        out.append(f'<text x="{ml + pw - 110}" y="{ly}">{escape(label)}</text>')
    out.append(f'<text x="{ml + pw / 2}" y="{height - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{mt + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {mt + ph / 2})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{width / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_loglog(path: str | Path, series: dict[str, tuple], xlabel: str, ylabel: str,
                 title: str = "") -> None:
    Path(path).write_text(loglog_svg(series, xlabel, ylabel, title))
