"""Minimal static SVG plotting: polylines and markers with axes, no dependencies.

Output is deterministic: fixed float formatting, no timestamps, insertion
order preserved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = ["Figure"]

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#7f7f7f"]


def _fmt(v: float) -> str:
    return format(v, ".6g")


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * abs(step):
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


@dataclass
class Figure:
    """Accumulates line/marker series and renders one SVG file."""

    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    width: int = 840
    height: int = 520
    _series: list = field(default_factory=list)

    def line(self, x, y, color: str | None = None, width: float = 1.5) -> None:
        pts = [(float(a), float(b)) for a, b in zip(x, y)]
        if pts:
            self._series.append(("line", pts, color, width))

    def markers(self, x, y, color: str | None = None, radius: float = 3.0) -> None:
        pts = [(float(a), float(b)) for a, b in zip(x, y)]
        if pts:
            self._series.append(("markers", pts, color, radius))

    def _bounds(self):
        xs = [p[0] for _, pts, *_ in self._series for p in pts]
        ys = [p[1] for _, pts, *_ in self._series for p in pts]
        if not xs:
            xs, ys = [0.0, 1.0], [0.0, 1.0]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        if x1 == x0:
            x0, x1 = x0 - 0.5, x1 + 0.5
        if y1 == y0:
            y0, y1 = y0 - 0.5, y1 + 0.5
        pad = 0.04 * (y1 - y0)
        return x0, x1, y0 - pad, y1 + pad

    def save(self, path: str) -> None:
        x0, x1, y0, y1 = self._bounds()
        ml, mr, mt, mb = 70, 20, 34 if self.title else 16, 48
        pw, ph = self.width - ml - mr, self.height - mt - mb

        def sx(v):
            return ml + pw * (v - x0) / (x1 - x0)

        def sy(v):
            return mt + ph * (1.0 - (v - y0) / (y1 - y0))

        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">',
            f'<rect width="{self.width}" height="{self.height}" fill="white"/>',
        ]
        if self.title:
            parts.append(
                f'<text x="{self.width // 2}" y="20" text-anchor="middle" '
                f'font-family="sans-serif" font-size="14">{self.title}</text>'
            )
        # frame
        parts.append(
            f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
            f'stroke="black" stroke-width="1"/>'
        )
        for t in _nice_ticks(x0, x1):
            X = sx(t)
            parts.append(
                f'<line x1="{_fmt(X)}" y1="{mt + ph}" x2="{_fmt(X)}" y2="{mt + ph + 5}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{_fmt(X)}" y="{mt + ph + 18}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
            )
        for t in _nice_ticks(y0, y1):
            Y = sy(t)
            parts.append(
                f'<line x1="{ml - 5}" y1="{_fmt(Y)}" x2="{ml}" y2="{_fmt(Y)}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{ml - 8}" y="{_fmt(Y)}" text-anchor="end" dominant-baseline="middle" '
                f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
            )
        if self.xlabel:
            parts.append(
                f'<text x="{ml + pw // 2}" y="{self.height - 10}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="12">{self.xlabel}</text>'
            )
        if self.ylabel:
            parts.append(
                f'<text x="16" y="{mt + ph // 2}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="12" '
                f'transform="rotate(-90 16 {mt + ph // 2})">{self.ylabel}</text>'
            )
        for i, (kind, pts, color, size) in enumerate(self._series):
            c = color or _COLORS[i % len(_COLORS)]
            if kind == "line":
                coords = " ".join(f"{_fmt(sx(px))},{_fmt(sy(py))}" for px, py in pts)
                parts.append(
                    f'<polyline points="{coords}" fill="none" stroke="{c}" '
                    f'stroke-width="{_fmt(size)}"/>'
                )
            else:
                for px, py in pts:
                    parts.append(
                        f'<circle cx="{_fmt(sx(px))}" cy="{_fmt(sy(py))}" r="{_fmt(size)}" '
                        f'fill="{c}"/>'
                    )
        parts.append("</svg>")
        with open(path, "w") as fh:
            fh.write("\n".join(parts) + "\n")
