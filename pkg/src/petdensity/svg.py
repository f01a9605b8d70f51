"""Tiny SVG line-chart writer (polylines, shaded band, axes, ticks)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from html import escape

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=20, top=40, bottom=55)
PALETTE = ["#1f3b8c", "#c0392b", "#27ae60", "#8e44ad", "#d35400"]


@dataclass
class Series:
    xs: list[float]
    ys: list[float]
    label: str
    color: str | None = None
    dashed: bool = False
    markers: bool = False


@dataclass
class Band:
    xs: list[float]
    lo: list[float]
    hi: list[float]
    color: str = "#8fa8e0"


@dataclass
class Chart:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series] = field(default_factory=list)
    bands: list[Band] = field(default_factory=list)
    log_x: bool = False
    log_y: bool = False

    def _tx(self, v):
        return math.log10(v) if self.log_x else v

    def _ty(self, v):
        return math.log10(v) if self.log_y else v

    def _extent(self):
        xs, ys = [], []
        for s in self.series:
            xs += [self._tx(v) for v in s.xs]
            ys += [self._ty(v) for v in s.ys]
        for b in self.bands:
            xs += [self._tx(v) for v in b.xs]
            ys += [self._ty(v) for v in b.lo + b.hi]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        if x1 == x0:
            x0, x1 = x0 - 1, x1 + 1
        pad = 0.05 * (y1 - y0 or 1.0)
        return x0, x1, y0 - pad, y1 + pad

    def render(self) -> str:
        x0, x1, y0, y1 = self._extent()
        left, right, top, bottom = (MARGIN[k] for k in ("left", "right", "top", "bottom"))
        pw, ph = WIDTH - left - right, HEIGHT - top - bottom

        def px(v):
            return left + (self._tx(v) - x0) / (x1 - x0) * pw

        def py(v):
            return top + (1 - (self._ty(v) - y0) / (y1 - y0)) * ph

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
               f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
               f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
               f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(self.title)}</text>']
        for b in self.bands:
            pts = [(px(x), py(v)) for x, v in zip(b.xs, b.hi)]
            pts += [(px(x), py(v)) for x, v in reversed(list(zip(b.xs, b.lo)))]
            out.append(f'<polygon points="{_pts(pts)}" fill="{b.color}" fill-opacity="0.45" stroke="none"/>')
        for i, s in enumerate(self.series):
            color = s.color or PALETTE[i % len(PALETTE)]
            dash = ' stroke-dasharray="6,4"' if s.dashed else ""
            pts = [(px(x), py(y)) for x, y in zip(s.xs, s.ys)]
            out.append(f'<polyline points="{_pts(pts)}" fill="none" stroke="{color}" stroke-width="2"{dash}/>')
            if s.markers:
                out += [f'<circle cx="{a:.2f}" cy="{b:.2f}" r="3" fill="{color}"/>' for a, b in pts]
            ly = top + 16 * (i + 1)
            out.append(f'<line x1="{left + pw - 150}" y1="{ly}" x2="{left + pw - 125}" y2="{ly}" '
                       f'stroke="{color}" stroke-width="2"{dash}/>')
            out.append(f'<text x="{left + pw - 120}" y="{ly + 4}">{escape(s.label)}</text>')
        # axes
        out.append(f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>')
        out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>')
        for k in range(5):
            tx = x0 + k * (x1 - x0) / 4
            ty = y0 + k * (y1 - y0) / 4
            gx = left + k * pw / 4
            gy = top + ph - k * ph / 4
            out.append(f'<line x1="{gx}" y1="{top + ph}" x2="{gx}" y2="{top + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{gx}" y="{top + ph + 18}" text-anchor="middle">{_tick(tx, self.log_x)}</text>')
            out.append(f'<line x1="{left - 5}" y1="{gy}" x2="{left}" y2="{gy}" stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{gy + 4}" text-anchor="end">{_tick(ty, self.log_y)}</text>')
        out.append(f'<text x="{left + pw / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(self.xlabel)}</text>')
        out.append(f'<text x="16" y="{top + ph / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {top + ph / 2})">{escape(self.ylabel)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.render())


def _pts(points) -> str:
    return " ".join(f"{a:.2f},{b:.2f}" for a, b in points)


def _tick(v: float, log: bool) -> str:
    return f"{10 ** v:.3g}" if log else f"{v:.3g}"
