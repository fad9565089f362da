"""Dependency-free SVG writers: polyline charts and grid heatmaps."""

from __future__ import annotations

from pathlib import Path

_W, _H = 860, 520
_ML, _MR, _MT, _MB = 70, 20, 40, 55
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
_MAX_POINTS = 3000


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def line_chart(path: str | Path, x, series, labels, title: str,
               xlabel: str, ylabel: str) -> None:
    """Write a polyline chart of one or more series against a shared x axis."""
    x = list(map(float, x))
    series = [list(map(float, s)) for s in series]
    stride = max(1, len(x) // _MAX_POINTS)
    x = x[::stride]
    series = [s[::stride] for s in series]

    x_lo, x_hi = min(x), max(x)
    y_lo = min(min(s) for s in series)
    y_hi = max(max(s) for s in series)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def sx(v):
        return _ML + pw * (v - x_lo) / (x_hi - x_lo) if x_hi > x_lo else _ML

    def sy(v):
        return _MT + ph * (1.0 - (v - y_lo) / (y_hi - y_lo))

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
             f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="13">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>',
             f'<text x="{_W / 2}" y="22" text-anchor="middle" font-size="16">{title}</text>']
    for tv in _ticks(x_lo, x_hi):
        px = sx(tv)
        parts.append(f'<line x1="{px:.1f}" y1="{_MT}" x2="{px:.1f}" y2="{_MT + ph}" '
                     'stroke="#dddddd"/>')
        parts.append(f'<text x="{px:.1f}" y="{_MT + ph + 18}" text-anchor="middle">'
                     f'{_fmt(tv)}</text>')
    for tv in _ticks(y_lo, y_hi):
        py = sy(tv)
        parts.append(f'<line x1="{_ML}" y1="{py:.1f}" x2="{_ML + pw}" y2="{py:.1f}" '
                     'stroke="#dddddd"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py + 4:.1f}" text-anchor="end">'
                     f'{_fmt(tv)}</text>')
    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
                 'fill="none" stroke="black"/>')
    for i, (s, label) in enumerate(zip(series, labels)):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{sx(xv):.1f},{sy(yv):.1f}" for xv, yv in zip(x, s))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     'stroke-width="1.5"/>')
        ly = _MT + 16 + 18 * i
        parts.append(f'<line x1="{_ML + pw - 150}" y1="{ly - 4}" x2="{_ML + pw - 120}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{_ML + pw - 112}" y="{ly}">{label}</text>')
    parts.append(f'<text x="{_ML + pw / 2}" y="{_H - 14}" text-anchor="middle">'
                 f'{xlabel}</text>')
    parts.append(f'<text x="18" y="{_MT + ph / 2}" text-anchor="middle" '
                 f'transform="rotate(-90 18 {_MT + ph / 2})">{ylabel}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))


def _heat_color(v: float) -> str:
    # blue (0) -> white (0.5) -> red (1)
    v = min(1.0, max(0.0, v))
    if v < 0.5:
        t = v / 0.5
        r, g, b = int(40 + 215 * t), int(90 + 165 * t), 255
    else:
        t = (v - 0.5) / 0.5
        r, g, b = 255, int(255 - 200 * t), int(255 - 215 * t)
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap(path: str | Path, matrix, x_values, y_values, title: str,
            xlabel: str, ylabel: str) -> None:
    """Write a colored grid of matrix[i][j] over y_values[i] x x_values[j]."""
    rows = [list(map(float, row)) for row in matrix]
    lo = min(min(r) for r in rows)
    hi = max(max(r) for r in rows)
    span = hi - lo if hi > lo else 1.0
    pw = _W - _ML - _MR - 60
    ph = _H - _MT - _MB
    cw = pw / len(x_values)
    ch = ph / len(y_values)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
             f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="13">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>',
             f'<text x="{_W / 2}" y="22" text-anchor="middle" font-size="16">{title}</text>']
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            parts.append(
                f'<rect x="{_ML + j * cw:.1f}" y="{_MT + i * ch:.1f}" '
                f'width="{cw:.2f}" height="{ch:.2f}" '
                f'fill="{_heat_color((v - lo) / span)}" stroke="#888888" '
                'stroke-width="0.5">'
                f'<title>{_fmt(v)}</title></rect>')
    for j, xv in enumerate(x_values):
        parts.append(f'<text x="{_ML + (j + 0.5) * cw:.1f}" y="{_MT + ph + 18}" '
                     f'text-anchor="middle">{_fmt(xv)}</text>')
    for i, yv in enumerate(y_values):
        parts.append(f'<text x="{_ML - 8}" y="{_MT + (i + 0.5) * ch + 4:.1f}" '
                     f'text-anchor="end">{_fmt(yv)}</text>')
    # color scale
    bar_x = _ML + pw + 18
    for s in range(40):
        v = 1.0 - s / 39.0
        parts.append(f'<rect x="{bar_x}" y="{_MT + ph * s / 40:.1f}" width="16" '
                     f'height="{ph / 40 + 0.5:.2f}" fill="{_heat_color(v)}"/>')
    parts.append(f'<text x="{bar_x + 20}" y="{_MT + 10}">{_fmt(hi)}</text>')
    parts.append(f'<text x="{bar_x + 20}" y="{_MT + ph}">{_fmt(lo)}</text>')
    parts.append(f'<text x="{_ML + pw / 2}" y="{_H - 14}" text-anchor="middle">'
                 f'{xlabel}</text>')
    parts.append(f'<text x="18" y="{_MT + ph / 2}" text-anchor="middle" '
                 f'transform="rotate(-90 18 {_MT + ph / 2})">{ylabel}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))
