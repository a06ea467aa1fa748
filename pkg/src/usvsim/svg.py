"""Top-view trajectory plots as plain SVG 1.1."""

from __future__ import annotations

import math

import numpy as np

from .errors import EmptyLog


def _nice_length(span: float) -> float:
    """Largest 1/2/5 x 10^k not above a fifth of ``span``."""
    target = max(span / 5.0, 1e-9)
    base = 10 ** math.floor(math.log10(target))
    for m in (5, 2, 1):
        if m * base <= target:
            return m * base
    return base


def emit_trajectory_svg(log, path=None, arrow_interval: float | None = None, size: int = 600,
                        title: str | None = None) -> str:
    """North-up polyline of (east, north) with start/end markers and a scale bar.

    ``log`` is a ManeuverLog or RunLog. With ``arrow_interval`` (seconds),
    heading (blue) and course (red) arrows are drawn at that spacing.
    Returns the SVG text and writes it to ``path`` if given.
    """
    if len(log) == 0:
        raise EmptyLog("cannot plot an empty log")
    east, north = log.column("east"), log.column("north")
    margin = 40.0
    span = max(east.max() - east.min(), north.max() - north.min(), 1.0)
    scale = (size - 2 * margin) / span
    e0, n1 = east.min(), north.max()

    def xy(e, n):
        return margin + (e - e0) * scale, margin + (n1 - n) * scale

    pts = " ".join("%.2f,%.2f" % xy(e, n) for e, n in zip(east, north))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{margin:.0f}" y="20" font-family="sans-serif" font-size="14">{title}</text>')
    out.append(f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>')
    sx, sy = xy(east[0], north[0])
    ex, ey = xy(east[-1], north[-1])
    out.append(f'<circle cx="{sx:.2f}" cy="{sy:.2f}" r="5" fill="green"><title>start</title></circle>')
    out.append(f'<rect x="{ex - 5:.2f}" y="{ey - 5:.2f}" width="10" height="10" fill="red">'
               '<title>end</title></rect>')

    if arrow_interval is not None and len(log) > 1:
        t = log.column("time")
        heading = log.column("heading")
        u, v = log.column("surge_vel"), log.column("sway_vel")
        course = heading + np.arctan2(v, u)
        moving = np.hypot(u, v) > 1e-6
        length = 0.04 * size
        next_t = t[0]
        for k in range(len(t)):
            if t[k] + 1e-9 < next_t:
                continue
            next_t += arrow_interval
            x, y = xy(east[k], north[k])
            angles = [(heading[k], "blue")] + ([(course[k], "red")] if moving[k] else [])
            for ang, colour in angles:
                x2, y2 = x + length * math.sin(ang), y - length * math.cos(ang)
                out.append(f'<line x1="{x:.2f}" y1="{y:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                           f'stroke="{colour}" stroke-width="1"/>')

    bar = _nice_length(span)
    bx, by = margin, size - margin / 2
    out.append(f'<line x1="{bx:.2f}" y1="{by:.2f}" x2="{bx + bar * scale:.2f}" y2="{by:.2f}" '
               'stroke="black" stroke-width="3"/>')
    out.append(f'<text x="{bx + bar * scale + 6:.2f}" y="{by + 4:.2f}" font-family="sans-serif" '
               f'font-size="12">{bar:g} m</text>')
    out.append(f'<text x="{size - margin / 2:.2f}" y="{margin:.2f}" font-family="sans-serif" '
               'font-size="14" text-anchor="middle">N</text>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    return text
