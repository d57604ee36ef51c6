"""Minimal standalone SVG plots: axes, histogram bars and polylines."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=64, right=20, top=36, bottom=48)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _num(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> np.ndarray:
    span = hi - lo
    if span <= 0:
        return np.array([lo])
    raw = span / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    return np.arange(np.ceil(lo / step) * step, hi + 1e-9 * span, step)


@dataclass
class Plot:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    lines: list = field(default_factory=list)  # (x, y, label)
    bars: list = field(default_factory=list)  # (edges, heights, label)

    def line(self, x: Sequence[float], y: Sequence[float], label: str = "") -> "Plot":
        self.lines.append((np.asarray(x, float), np.asarray(y, float), label))
        return self

    def histogram(self, edges: Sequence[float], heights: Sequence[float], label: str = "") -> "Plot":
        self.bars.append((np.asarray(edges, float), np.asarray(heights, float), label))
        return self

    def _limits(self):
        xs = [x for x, _, _ in self.lines] + [e for e, _, _ in self.bars]
        ys = [y for _, y, _ in self.lines] + [h for _, h, _ in self.bars] + [np.zeros(1)] * bool(self.bars)
        if not xs:
            return 0.0, 1.0, 0.0, 1.0
        x0, x1 = min(v.min() for v in xs), max(v.max() for v in xs)
        y0, y1 = min(v.min() for v in ys), max(v.max() for v in ys)
        if x1 <= x0:
            x0, x1 = x0 - 0.5, x1 + 0.5
        if y1 <= y0:
            y0, y1 = y0 - 0.5, y1 + 0.5
        pad = 0.05 * (y1 - y0)
        return float(x0), float(x1), float(y0 - pad * (y0 < 0)), float(y1 + pad)

    def render(self) -> str:
        x0, x1, y0, y1 = self._limits()
        L, R, T, B = MARGIN["left"], WIDTH - MARGIN["right"], MARGIN["top"], HEIGHT - MARGIN["bottom"]

        def sx(v):
            return L + (np.asarray(v) - x0) / (x1 - x0) * (R - L)

        def sy(v):
            return B - (np.asarray(v) - y0) / (y1 - y0) * (B - T)

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
               f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
               f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
        for k, (edges, heights, _) in enumerate(self.bars):
            colour = PALETTE[(k + 7) % len(PALETTE)]
            for a, b, h in zip(edges[:-1], edges[1:], heights):
                top, base = sy(max(h, 0.0)), sy(0.0)
                out.append(f'<rect x="{_num(sx(a))}" y="{_num(top)}" width="{_num(sx(b) - sx(a))}" '
                           f'height="{_num(base - top)}" fill="{colour}" fill-opacity="0.35" stroke="{colour}" '
                           f'stroke-width="0.5"/>')
        for k, (x, y, _) in enumerate(self.lines):
            pts = " ".join(f"{_num(a)},{_num(b)}" for a, b in zip(sx(x), sy(y)))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{PALETTE[k % len(PALETTE)]}" '
                       f'stroke-width="1.2"/>')
        out.append(f'<path d="M{L},{T} V{B} H{R}" fill="none" stroke="black"/>')
        for t in _ticks(x0, x1):
            px = _num(sx(t))
            out.append(f'<line x1="{px}" y1="{B}" x2="{px}" y2="{B + 4}" stroke="black"/>')
            out.append(f'<text x="{px}" y="{B + 16}" text-anchor="middle">{t:.4g}</text>')
        for t in _ticks(y0, y1):
            py = _num(sy(t))
            out.append(f'<line x1="{L - 4}" y1="{py}" x2="{L}" y2="{py}" stroke="black"/>')
            out.append(f'<text x="{L - 6}" y="{py}" text-anchor="end" dominant-baseline="middle">{t:.4g}</text>')
        out.append(f'<text x="{(L + R) / 2:.1f}" y="{T - 14}" text-anchor="middle" font-size="13">'
                   f'{escape(self.title)}</text>')
        out.append(f'<text x="{(L + R) / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle">{escape(self.xlabel)}</text>')
        out.append(f'<text x="14" y="{(T + B) / 2:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 14 {(T + B) / 2:.1f})">{escape(self.ylabel)}</text>')
        labels = [(PALETTE[k % len(PALETTE)], lab) for k, (_, _, lab) in enumerate(self.lines) if lab]
        labels += [(PALETTE[(k + 7) % len(PALETTE)], lab) for k, (_, _, lab) in enumerate(self.bars) if lab]
        for i, (colour, lab) in enumerate(labels):
            y = T + 8 + 14 * i
            out.append(f'<rect x="{R - 130}" y="{y - 7}" width="10" height="10" fill="{colour}"/>')
            out.append(f'<text x="{R - 116}" y="{y + 2}">{escape(lab)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(), encoding="utf-8")
        return path
