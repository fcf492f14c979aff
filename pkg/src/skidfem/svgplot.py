"""Dependency-free SVG polyline plots (linear/log axes, multiple series)."""

from __future__ import annotations

import math

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 72, 20, 28, 52
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _nice_ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for m in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= m * mag:
            step = m * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-12 * abs(step):
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _log_ticks(lo: float, hi: float):
    d0 = math.floor(math.log10(lo))
    d1 = math.ceil(math.log10(hi))
    return [10.0 ** d for d in range(d0, d1 + 1)
            if lo / 1.001 <= 10.0 ** d <= hi * 1.001]


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.0e}"
    return f"{v:g}"


def plot_xy(series, path, title="", xlabel="", ylabel="",
            logx=False, logy=False) -> None:
    """Write an SVG line plot.

    series: list of (x_array, y_array, label). Log axes drop nonpositive
    points of the offending coordinate.
    """
    pts = []
    for xs, ys, _ in series:
        for x, y in zip(xs, ys):
            if (not logx or x > 0) and (not logy or y > 0):
                pts.append((float(x), float(y)))
    if not pts:
        raise ValueError("nothing to plot")
    xs_all = [p[0] for p in pts]
    ys_all = [p[1] for p in pts]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if logx:
        tx = _log_ticks(x0, x1)
        x0, x1 = math.log10(x0), math.log10(max(x1, x0 * 1.0000001))
    else:
        pad = 0.05 * (x1 - x0 or 1.0)
        x0, x1 = x0 - pad, x1 + pad
        tx = _nice_ticks(x0, x1)
    if logy:
        ty = _log_ticks(y0, y1)
        y0, y1 = math.log10(y0), math.log10(max(y1, y0 * 1.0000001))
    else:
        pad = 0.05 * (y1 - y0 or 1.0)
        y0, y1 = y0 - pad, y1 + pad
        ty = _nice_ticks(y0, y1)

    def sx(x):
        v = math.log10(x) if logx else x
        return _ML + (v - x0) / (x1 - x0) * (_W - _ML - _MR)

    def sy(y):
        v = math.log10(y) if logy else y
        return _H - _MB - (v - y0) / (y1 - y0) * (_H - _MT - _MB)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>',
           f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
           f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>']
    for t in tx:
        px = sx(t)
        out.append(f'<line x1="{px:.1f}" y1="{_H - _MB}" x2="{px:.1f}" '
                   f'y2="{_H - _MB + 5}" stroke="black"/>')
        out.append(f'<line x1="{px:.1f}" y1="{_MT}" x2="{px:.1f}" y2="{_H - _MB}" '
                   f'stroke="#dddddd"/>')
        out.append(f'<text x="{px:.1f}" y="{_H - _MB + 18}" '
                   f'text-anchor="middle">{_fmt(t)}</text>')
    for t in ty:
        py = sy(t)
        out.append(f'<line x1="{_ML - 5}" y1="{py:.1f}" x2="{_ML}" '
                   f'y2="{py:.1f}" stroke="black"/>')
        out.append(f'<line x1="{_ML}" y1="{py:.1f}" x2="{_W - _MR}" y2="{py:.1f}" '
                   f'stroke="#dddddd"/>')
        out.append(f'<text x="{_ML - 8}" y="{py + 4:.1f}" '
                   f'text-anchor="end">{_fmt(t)}</text>')
    for k, (xs, ys, label) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        coords = [(sx(x), sy(y)) for x, y in zip(xs, ys)
                  if (not logx or x > 0) and (not logy or y > 0)]
        d = " ".join(f"{px:.2f},{py:.2f}" for px, py in coords)
        out.append(f'<polyline points="{d}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        if label:
            ly = _MT + 16 + 16 * k
            out.append(f'<line x1="{_W - _MR - 120}" y1="{ly - 4}" '
                       f'x2="{_W - _MR - 95}" y2="{ly - 4}" stroke="{color}" '
                       f'stroke-width="1.5"/>')
            out.append(f'<text x="{_W - _MR - 90}" y="{ly}">{label}</text>')
    if title:
        out.append(f'<text x="{_W / 2}" y="{_MT - 10}" text-anchor="middle" '
                   f'font-size="14">{title}</text>')
    if xlabel:
        out.append(f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 14}" '
                   f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{(_MT + _H - _MB) / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2})">{ylabel}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
