"""Minimal SVG line charts (no plotting dependency)."""

import math
from xml.sax.saxutils import escape

import numpy as np

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def _panel(x, series, ox, oy, w, h, title, log=False):
    """SVG fragment for one chart; ``series`` is a list of (label, y)."""
    out = []
    ys = []
    for _, y in series:
        y = np.asarray(y, dtype=float)
        ys.append(np.log10(np.where(y > 0, y, np.nan)) if log else y)
    finite = np.concatenate([y[np.isfinite(y)] for y in ys]) if ys else np.array([0.0])
    ylo, yhi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if yhi - ylo < 1e-300:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    xlo, xhi = float(np.min(x)), float(np.max(x))
    if xhi <= xlo:
        xhi = xlo + 1.0

    def px(v):
        return ox + (v - xlo) / (xhi - xlo) * w

    def py(v):
        return oy + h - (v - ylo) / (yhi - ylo) * h

    out.append(f'<rect x="{ox}" y="{oy}" width="{w}" height="{h}" fill="none" stroke="#000"/>')
    out.append(f'<text x="{ox + w / 2}" y="{oy - 8}" text-anchor="middle" font-size="13">{escape(title)}</text>')
    for t in _ticks(xlo, xhi):
        out.append(f'<line x1="{px(t):.2f}" y1="{oy + h}" x2="{px(t):.2f}" y2="{oy + h + 4}" stroke="#000"/>')
        out.append(f'<text x="{px(t):.2f}" y="{oy + h + 16}" text-anchor="middle" font-size="10">{t:g}</text>')
    for t in _ticks(ylo, yhi):
        label = f"1e{t:g}" if log else f"{t:g}"
        out.append(f'<line x1="{ox - 4}" y1="{py(t):.2f}" x2="{ox}" y2="{py(t):.2f}" stroke="#000"/>')
        out.append(f'<text x="{ox - 6}" y="{py(t) + 3:.2f}" text-anchor="end" font-size="10">{label}</text>')
    out.append(f'<text x="{ox + w / 2}" y="{oy + h + 32}" text-anchor="middle" font-size="11">t</text>')
    for i, ((label, _), y) in enumerate(zip(series, ys)):
        ok = np.isfinite(y)
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(np.asarray(x)[ok], y[ok]))
        color = _COLORS[i % len(_COLORS)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        if len(series) > 1:
            ly = oy + 14 + 14 * i
            out.append(f'<line x1="{ox + w - 110}" y1="{ly - 4}" x2="{ox + w - 90}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{ox + w - 85}" y="{ly}" font-size="10">{escape(label)}</text>')
    return out


def write_plot(path, times, series, title, config_hash="", log_only=False):
    """Write linear and log10 charts of ``series`` against ``times``."""
    panels = [("log10 " + title, True)] if log_only else [(title, False), ("log10 " + title, True)]
    w, h, pad = 420, 280, 70
    width = pad + len(panels) * (w + pad)
    height = h + 2 * pad
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<metadata>config_hash={escape(config_hash)}</metadata>",
        f'<rect width="{width}" height="{height}" fill="#fff"/>',
    ]
    for i, (name, log) in enumerate(panels):
        parts += _panel(times, series, pad + i * (w + pad), pad, w, h, name, log=log)
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
