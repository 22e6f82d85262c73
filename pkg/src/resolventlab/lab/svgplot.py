"""Minimal deterministic SVG line plots (no timestamps, fixed formatting)."""

import numpy as np

_W, _H = 720, 540
_ML, _MR, _MT, _MB = 80, 25, 45, 60
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, n)


def line_plot(path, series, labels, title, xlabel, ylabel):
    """Write a polyline plot of [(xs, ys), ...] to an SVG file."""
    xs_all = np.concatenate([np.asarray(s[0], float) for s in series])
    ys_all = np.concatenate([np.asarray(s[1], float) for s in series])
    x_lo, x_hi = float(np.min(xs_all)), float(np.max(xs_all))
    y_lo, y_hi = float(np.min(ys_all)), float(np.max(ys_all))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad_y = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad_y, y_hi + pad_y

    def px(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def py(y):
        return _H - _MB - (y - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="25" font-family="sans-serif" font-size="16" '
        f'text-anchor="middle">{title}</text>',
    ]
    # axes box and ticks
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" height="{_H - _MT - _MB}" '
        f'fill="none" stroke="black" stroke-width="1"/>')
    for tx in _ticks(x_lo, x_hi):
        X = _fmt(px(tx))
        parts.append(f'<line x1="{X}" y1="{_H - _MB}" x2="{X}" y2="{_H - _MB + 5}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{X}" y="{_H - _MB + 20}" font-family="sans-serif" '
                     f'font-size="11" text-anchor="middle">{tx:.4g}</text>')
    for ty in _ticks(y_lo, y_hi):
        Y = _fmt(py(ty))
        parts.append(f'<line x1="{_ML - 5}" y1="{Y}" x2="{_ML}" y2="{Y}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{Y}" font-family="sans-serif" '
                     f'font-size="11" text-anchor="end" dominant-baseline="middle">'
                     f'{ty:.4g}</text>')
    parts.append(f'<text x="{_W // 2}" y="{_H - 15}" font-family="sans-serif" '
                 f'font-size="13" text-anchor="middle">{xlabel}</text>')
    parts.append(f'<text x="20" y="{_H // 2}" font-family="sans-serif" font-size="13" '
                 f'text-anchor="middle" transform="rotate(-90 20 {_H // 2})">'
                 f'{ylabel}</text>')

    for i, ((xs, ys), label) in enumerate(zip(series, labels)):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{_fmt(px(float(x)))},{_fmt(py(float(y)))}"
                       for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        for x, y in zip(xs, ys):
            parts.append(f'<circle cx="{_fmt(px(float(x)))}" cy="{_fmt(py(float(y)))}" '
                         f'r="2.5" fill="{color}"/>')
        parts.append(f'<text x="{_W - _MR - 10}" y="{_MT + 18 + 16 * i}" '
                     f'font-family="sans-serif" font-size="12" text-anchor="end" '
                     f'fill="{color}">{label}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
