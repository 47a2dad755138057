"""Static SVG figures of blocks, boundary marks and star outlines."""
from __future__ import annotations

import math
from typing import Iterable, Sequence

from .geometry import TWO_PI

SIZE = 1000
CENTER = SIZE / 2
RADIUS = 480.0
POLYGON_SIDES = 64
MAX_MARKS = 4096


def _xy(r: float, theta: float) -> str:
    x = CENTER + RADIUS * r * math.cos(theta)
    y = CENTER - RADIUS * r * math.sin(theta)
    return f"{x:.3f},{y:.3f}"


def _arc_points(r: float, t0: float, t1: float) -> list[str]:
    n = max(1, math.ceil(POLYGON_SIDES * (t1 - t0) / TWO_PI))
    return [_xy(r, t0 + (t1 - t0) * i / n) for i in range(n + 1)]


def sector_path(t0: float, t1: float, d_inner: float, d_outer: float) -> str:
    """Annular sector ``t0 < arg z < t1``, ``d_inner < 1 - |z| < d_outer``."""
    outer = _arc_points(1.0 - d_inner, t0, t1)
    inner = _arc_points(1.0 - d_outer, t0, t1)[::-1]
    return "M" + " L".join(outer + inner) + " Z"


def star_outline(angles: Sequence[float], t: float, samples: int = 2048) -> list[tuple[float, float]]:
    """Boundary ``1 - |z| = t dist(z, F)`` as ``(theta, r)`` pairs (angles in radians)."""
    ang = sorted(a % TWO_PI for a in angles)
    pts = []
    for i in range(samples + 1):
        th = TWO_PI * i / samples
        gap = min(min(abs(th - a), TWO_PI - abs(th - a)) for a in ang)
        s2 = math.sin(gap / 2.0) ** 2
        a2 = 1.0 - t * t
        b = 4.0 * t * t * s2
        d = (-b + math.sqrt(b * b + 4.0 * a2 * b)) / (2.0 * a2)
        pts.append((th, 1.0 - min(d, 1.0)))
    return pts


def render(blocks: Iterable[tuple[float, float, float, float]], marks: Sequence[float] = (),
           stars: Sequence[Sequence[float]] = (), star_t: float = 0.1, title: str = "") -> str:
    """SVG 1.1 document.  ``blocks`` are ``(t0, t1, d_inner, d_outer)`` in radians / depths."""
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
    ]
    if title:
        out.append(f"<title>{title}</title>")
    out.append(f'<circle cx="{CENTER}" cy="{CENTER}" r="{RADIUS}" fill="none" stroke="black" stroke-width="1"/>')
    for t0, t1, di, do in blocks:
        out.append(f'<path class="block" d="{sector_path(t0, t1, di, do)}" fill="#4a7ab0" '
                   f'fill-opacity="0.6" stroke="#1d3b5e" stroke-width="0.3"/>')
    if len(marks) <= MAX_MARKS:
        for th in marks:
            x, y = _xy(1.0, th).split(",")
            out.append(f'<circle class="mark" cx="{x}" cy="{y}" r="1.5" fill="#b0402a"/>')
    else:
        out.append(f"<!-- {len(marks)} marks omitted -->")
    for F in stars:
        pts = " ".join(_xy(r, th) for th, r in star_outline(F, star_t))
        out.append(f'<polyline class="star" points="{pts}" fill="none" stroke="#2a8a3a" stroke-width="0.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
