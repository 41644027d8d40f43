"""Minimal self-contained SVG line charts (capacity curves, drift profiles, convergence)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

COLORS = {"IO": "#1f77b4", "LS": "#2ca02c", "CP": "#d62728"}
_FALLBACK = ("#9467bd", "#8c564b", "#7f7f7f")

W, H = 560, 400
ML, MR, MT, MB = 70, 110, 40, 55


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out, v = [], start
    while v <= hi + 1e-12 * step:
        out.append(round(v, 12))
        v += step
    return out


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def line_chart(series: dict, title: str, xlabel: str, ylabel: str, steps: bool = False) -> str:
    """``series`` maps a label to (xs, ys). Returns SVG text."""
    pts = [(x, y) for xs, ys in series.values() for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
    if pts:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    else:
        x0 = y0 = 0.0
        x1 = y1 = 1.0
    x0, y0 = min(x0, 0.0), min(y0, 0.0)
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 <= y0:
        y1 = y0 + 1.0
    pw, ph = W - ML - MR, H - MT - MB

    def sx(x):
        return ML + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return MT + ph - (y - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
           f'font-family="sans-serif" font-size="12">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>']
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.2f}" y1="{MT}" x2="{sx(t):.2f}" y2="{MT + ph}" stroke="#eee"/>')
        out.append(f'<text x="{sx(t):.2f}" y="{MT + ph + 16}" text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{ML}" y1="{sy(t):.2f}" x2="{ML + pw}" y2="{sy(t):.2f}" stroke="#eee"/>')
        out.append(f'<text x="{ML - 6}" y="{sy(t) + 4:.2f}" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<rect x="{ML}" y="{MT}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>')
    out.append(f'<text x="{ML + pw / 2:.1f}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text transform="translate(16,{MT + ph / 2:.1f}) rotate(-90)" text-anchor="middle">'
               f'{escape(ylabel)}</text>')
    for n, (label, (xs, ys)) in enumerate(series.items()):
        color = COLORS.get(label, _FALLBACK[n % len(_FALLBACK)])
        coords = []
        prev = None
        for x, y in zip(xs, ys):
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            if steps and prev is not None:
                coords.append(f"{sx(x):.2f},{sy(prev):.2f}")
            coords.append(f"{sx(x):.2f},{sy(y):.2f}")
            prev = y
        if coords:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{" ".join(coords)}"/>')
        ly = MT + 14 + 18 * n
        out.append(f'<line x1="{ML + pw + 12}" y1="{ly}" x2="{ML + pw + 32}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{ML + pw + 38}" y="{ly + 4}">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def capacity_plot(curves: dict, title: str = "Capacity curve") -> str:
    """``curves`` maps a label to (roof displacement m, base shear kN)."""
    return line_chart(curves, title, "roof displacement (m)", "base shear (kN)")


def drift_plot(profiles: dict, title: str = "Story drift at target displacement") -> str:
    """``profiles`` maps a label to a drift ratio per story (bottom first)."""
    series = {}
    for label, d in profiles.items():
        if d is None:
            continue
        ys: list[float] = []
        xs: list[float] = []
        for k, v in enumerate(d):
            xs += [float(v), float(v)]
            ys += [float(k), float(k + 1)]
        series[label] = (xs, ys)
    return line_chart(series, title, "inter-story drift ratio", "story")


def convergence_plot(histories: dict, title: str = "Convergence history") -> str:
    series = {lv: ([h.iteration for h in hist], [h.best_phi for h in hist]) for lv, hist in histories.items()}
    return line_chart(series, title, "iteration", "best penalized weight (kg)", steps=True)
