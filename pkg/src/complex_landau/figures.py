"""Hand-written SVG output: line plots, heatmaps and the spectrum panels."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .operator_core import ContinuousPart, classify_spectrum

__all__ = ["FigurePanel", "figure1_panels", "panel_svg", "line_plot_svg", "heatmap_svg"]

CYAN = "#00bcd4"
MAGENTA = "#d81b60"
W, H, PAD = 480, 360, 50

PANEL_B = {
    "A": 0j,
    "B": 1 + 0j,
    "C": cmath.exp(1j * math.pi / 4),
    "D": cmath.exp(-1j * math.pi / 4),
    "E": 1j,
}


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _header(width=W, height=H, attrs="") -> list[str]:
    return [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}"{attrs}>',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']


class _Axes:
    def __init__(self, xlim, ylim, width=W, height=H):
        self.xlim, self.ylim = xlim, ylim
        self.width, self.height = width, height

    def px(self, x):
        x0, x1 = self.xlim
        return PAD + (x - x0) / (x1 - x0) * (self.width - 2 * PAD)

    def py(self, y):
        y0, y1 = self.ylim
        return self.height - PAD - (y - y0) / (y1 - y0) * (self.height - 2 * PAD)

    def frame(self, xlabel, ylabel, title) -> list[str]:
        x0, x1 = self.xlim
        y0, y1 = self.ylim
        out = [f'<rect x="{PAD}" y="{PAD}" width="{self.width - 2 * PAD}" '
               f'height="{self.height - 2 * PAD}" fill="none" stroke="black"/>']
        for t in np.linspace(x0, x1, 5):
            out.append(f'<text x="{_fmt(self.px(t))}" y="{self.height - PAD + 15}" font-size="10" '
                       f'text-anchor="middle">{_fmt(t)}</text>')
        for t in np.linspace(y0, y1, 5):
            out.append(f'<text x="{PAD - 5}" y="{_fmt(self.py(t) + 3)}" font-size="10" '
                       f'text-anchor="end">{_fmt(t)}</text>')
        out.append(f'<text x="{self.width / 2}" y="{self.height - 10}" font-size="12" '
                   f'text-anchor="middle">{escape(xlabel)}</text>')
        out.append(f'<text x="12" y="{self.height / 2}" font-size="12" text-anchor="middle" '
                   f'transform="rotate(-90 12 {self.height / 2})">{escape(ylabel)}</text>')
        out.append(f'<text x="{self.width / 2}" y="20" font-size="13" '
                   f'text-anchor="middle">{escape(title)}</text>')
        return out


def _limits(v, pad=0.05):
    v = np.asarray(v, dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return (0.0, 1.0)
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    span = hi - lo
    return lo - pad * span, hi + pad * span


def line_plot_svg(x, series: dict, xlabel="", ylabel="", title="", annotation="") -> str:
    """Polyline plot; ``series`` maps a label to y values (non-finite points skipped)."""
    ys = [np.asarray(v, dtype=float) for v in series.values()]
    ax = _Axes(_limits(x), _limits(np.concatenate(ys)))
    out = _header() + ax.frame(xlabel, ylabel, title)
    colors = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd"]
    for i, (label, y) in enumerate(series.items()):
        pts = [(ax.px(a), ax.py(b)) for a, b in zip(x, y) if math.isfinite(b)]
        c = colors[i % len(colors)]
        out.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="'
                   + " ".join(f"{_fmt(p)},{_fmt(q)}" for p, q in pts) + '"/>')
        for p, q in pts:
            out.append(f'<circle cx="{_fmt(p)}" cy="{_fmt(q)}" r="2.5" fill="{c}"/>')
        out.append(f'<text x="{W - PAD - 5}" y="{PAD + 15 + 14 * i}" font-size="11" '
                   f'text-anchor="end" fill="{c}">{escape(label)}</text>')
    if annotation:
        out.append(f'<text class="annotation" x="{PAD + 5}" y="{H - PAD - 8}" '
                   f'font-size="11">{escape(annotation)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _ramp(t):
    # dark blue -> yellow
    t = min(max(t, 0.0), 1.0)
    r, g, b = int(30 + 225 * t), int(30 + 200 * t), int(120 - 100 * t)
    return f"rgb({r},{g},{b})"


def heatmap_svg(re, im, values, title="", overlay=()) -> str:
    """Heatmap of ``values`` (shape len(im) x len(re)); overlay points in magenta."""
    re, im = np.asarray(re, dtype=float), np.asarray(im, dtype=float)
    v = np.asarray(values, dtype=float)
    dx = (re[1] - re[0]) if len(re) > 1 else 1.0
    dy = (im[1] - im[0]) if len(im) > 1 else 1.0
    ax = _Axes((re[0] - dx / 2, re[-1] + dx / 2), (im[0] - dy / 2, im[-1] + dy / 2))
    out = _header() + ax.frame("Re lambda", "Im lambda", title)
    finite = v[np.isfinite(v)]
    lo, hi = (finite.min(), finite.max()) if finite.size else (0.0, 1.0)
    span = (hi - lo) or 1.0
    cw = abs(ax.px(dx) - ax.px(0))
    ch = abs(ax.py(dy) - ax.py(0))
    for j, y in enumerate(im):
        for i, x in enumerate(re):
            fill = _ramp((v[j, i] - lo) / span) if math.isfinite(v[j, i]) else "gray"
            out.append(f'<rect x="{_fmt(ax.px(x) - cw / 2)}" y="{_fmt(ax.py(y) - ch / 2)}" '
                       f'width="{_fmt(cw + 0.5)}" height="{_fmt(ch + 0.5)}" fill="{fill}"/>')
    for z in overlay:
        if ax.xlim[0] <= z.real <= ax.xlim[1] and ax.ylim[0] <= z.imag <= ax.ylim[1]:
            out.append(f'<circle class="point" cx="{_fmt(ax.px(z.real))}" cy="{_fmt(ax.py(z.imag))}" '
                       f'r="3" fill="none" stroke="{MAGENTA}" stroke-width="1.5"/>')
    out.append(f'<text x="{W - PAD}" y="{PAD - 8}" font-size="10" text-anchor="end">'
               f'colour: {_fmt(lo)} .. {_fmt(hi)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class FigurePanel:
    panel_id: str
    b: complex
    continuous: ContinuousPart
    points: tuple

    @classmethod
    def build(cls, panel_id: str, b=None, kmax: int = 4) -> "FigurePanel":
        b = PANEL_B[panel_id] if b is None else complex(b)
        cls_ = classify_spectrum(b)
        # b and -b share their Landau set (the sign is fixed by Re > 0)
        pts = cls_.point_spectrum(kmax)
        return cls(panel_id, b, cls_.continuous, tuple(pts))


def figure1_panels(kmax: int = 4) -> list[FigurePanel]:
    return [FigurePanel.build(p, kmax=kmax) for p in "ABCDE"]


def panel_svg(panel: FigurePanel, extent: float = 10.0) -> str:
    ax = _Axes((-extent, extent), (-extent, extent), W, W)
    attrs = (f' data-panel="{panel.panel_id}" data-b-re="{panel.b.real!r}" '
             f'data-b-im="{panel.b.imag!r}" data-continuous="{panel.continuous.value}" '
             f'data-point-count="{len(panel.points)}"')
    out = _header(W, W, attrs)
    x0, y0 = ax.px(-extent), ax.py(extent)
    size = ax.px(extent) - x0
    if panel.continuous in (ContinuousPart.PLANE, ContinuousPart.PLANE_MINUS_POINTS):
        out.append(f'<rect class="continuous" x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(size)}" '
                   f'height="{_fmt(size)}" fill="{CYAN}" fill-opacity="0.5"/>')
    elif panel.continuous == ContinuousPart.HALF_LINE:
        out.append(f'<line class="continuous" x1="{_fmt(ax.px(0))}" y1="{_fmt(ax.py(0))}" '
                   f'x2="{_fmt(ax.px(extent))}" y2="{_fmt(ax.py(0))}" stroke="{CYAN}" stroke-width="4"/>')
    out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(ax.py(0))}" x2="{_fmt(x0 + size)}" y2="{_fmt(ax.py(0))}" '
               f'stroke="black" stroke-width="0.5"/>')
    out.append(f'<line x1="{_fmt(ax.px(0))}" y1="{_fmt(y0)}" x2="{_fmt(ax.px(0))}" y2="{_fmt(y0 + size)}" '
               f'stroke="black" stroke-width="0.5"/>')
    for z in panel.points:
        out.append(f'<circle class="point" data-re="{z.real!r}" data-im="{z.imag!r}" '
                   f'cx="{_fmt(ax.px(z.real))}" cy="{_fmt(ax.py(z.imag))}" r="4" fill="{MAGENTA}"/>')
    label = {"A": "b = 0", "B": "b = +-1", "C": "b = +-e^{i pi/4}", "D": "b = +-e^{-i pi/4}",
             "E": "b = +-i"}.get(panel.panel_id, f"b = {panel.b:.3g}")
    out.append(f'<text x="{W / 2}" y="20" font-size="13" text-anchor="middle">'
               f'({panel.panel_id}) {escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
