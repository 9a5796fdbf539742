"""Minimal SVG emission: line charts and dendrograms.

No styling ambitions; axes, ticks, series and labels only. All functions
return the SVG document as a string.
"""

from __future__ import annotations

import numpy as np

from .hierarchy import Dendrogram

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 30, 60
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _esc(text: str) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _ticks(lo: float, hi: float, n: int = 6) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min(s for s in (mag, 2 * mag, 2.5 * mag, 5 * mag, 10 * mag)
               if s >= raw)
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + step / 2, step)


def line_chart(series: dict[str, tuple], xlabel: str, ylabel: str,
               title: str = "") -> str:
    """Multi-series line chart; each value is an (x array, y array) pair."""
    xs = np.concatenate([np.asarray(x, dtype=float) for x, _ in series.values()])
    ys = np.concatenate([np.asarray(y, dtype=float) for _, y in series.values()])
    xlo, xhi = float(xs.min()), float(xs.max())
    ylo, yhi = float(ys.min()), float(ys.max())
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad

    def px(x):
        return _ML + (x - xlo) / (xhi - xlo) * (_W - _ML - _MR)

    def py(y):
        return _H - _MB - (y - ylo) / (yhi - ylo) * (_H - _MT - _MB)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'font-family="sans-serif" font-size="12">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>']
    if title:
        out.append(f'<text x="{_W / 2}" y="20" text-anchor="middle" '
                   f'font-size="14">{_esc(title)}</text>')
    # axes
    out.append(f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" '
               f'y2="{_H - _MB}" stroke="black"/>')
    out.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" '
               f'stroke="black"/>')
    for t in _ticks(xlo, xhi):
        out.append(f'<line x1="{px(t):.1f}" y1="{_H - _MB}" x2="{px(t):.1f}" '
                   f'y2="{_H - _MB + 5}" stroke="black"/>')
        out.append(f'<text x="{px(t):.1f}" y="{_H - _MB + 18}" '
                   f'text-anchor="middle">{t:g}</text>')
    for t in _ticks(ylo, yhi):
        out.append(f'<line x1="{_ML - 5}" y1="{py(t):.1f}" x2="{_ML}" '
                   f'y2="{py(t):.1f}" stroke="black"/>')
        out.append(f'<text x="{_ML - 8}" y="{py(t):.1f}" text-anchor="end" '
                   f'dominant-baseline="middle">{t:g}</text>')
    out.append(f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 15}" '
               f'text-anchor="middle">{_esc(xlabel)}</text>')
    out.append(f'<text x="18" y="{(_MT + _H - _MB) / 2}" text-anchor="middle" '
               f'transform="rotate(-90 18 {(_MT + _H - _MB) / 2})">'
               f'{_esc(ylabel)}</text>')
    for n, (name, (x, y)) in enumerate(series.items()):
        color = _COLORS[n % len(_COLORS)]
        pts = " ".join(f"{px(a):.1f},{py(b):.1f}" for a, b in zip(x, y))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        out.append(f'<text x="{_W - _MR - 5}" y="{_MT + 14 * (n + 1)}" '
                   f'text-anchor="end" fill="{color}">{_esc(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def dendrogram_svg(dendrogram: Dendrogram, title: str = "") -> str:
    """Leaves along the bottom, merge heights on the vertical axis."""
    I = dendrogram.item_count
    # leaf order: left-to-right in-order traversal of the merge tree
    children: dict[int, tuple[int, int]] = {}
    for m in dendrogram.merges:
        children[I + m.step - 1] = (m.left, m.right)
    root = I + len(dendrogram.merges) - 1

    leaf_order: list[int] = []
    stack = [root]
    while stack:
        node = stack.pop()
        if node < I:
            leaf_order.append(node)
        else:
            left, right = children[node]
            stack.append(right)
            stack.append(left)

    heights = [m.height for m in dendrogram.merges]
    hmax = max(max(heights), 1e-9)
    xpos = {leaf: i for i, leaf in enumerate(leaf_order)}

    def px(x):
        return _ML + (x + 0.5) / I * (_W - _ML - _MR)

    def py(h):
        return _H - _MB - h / (hmax * 1.05) * (_H - _MT - _MB)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'font-family="sans-serif" font-size="11">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>']
    if title:
        out.append(f'<text x="{_W / 2}" y="20" text-anchor="middle" '
                   f'font-size="14">{_esc(title)}</text>')
    out.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" '
               f'stroke="black"/>')
    for t in _ticks(0.0, hmax):
        out.append(f'<line x1="{_ML - 5}" y1="{py(t):.1f}" x2="{_ML}" '
                   f'y2="{py(t):.1f}" stroke="black"/>')
        out.append(f'<text x="{_ML - 8}" y="{py(t):.1f}" text-anchor="end" '
                   f'dominant-baseline="middle">{t:g}</text>')
    ylab = ("merge step" if dendrogram.height_mode == "step-index"
            else "linkage distance")
    out.append(f'<text x="18" y="{(_MT + _H - _MB) / 2}" text-anchor="middle" '
               f'transform="rotate(-90 18 {(_MT + _H - _MB) / 2})">'
               f'{_esc(ylab)}</text>')

    node_x = {leaf: float(xpos[leaf]) for leaf in range(I)}
    node_h = {leaf: 0.0 for leaf in range(I)}
    for m in dendrogram.merges:
        xl, xr = node_x[m.left], node_x[m.right]
        hl, hr = node_h[m.left], node_h[m.right]
        h = m.height
        out.append(f'<line x1="{px(xl):.1f}" y1="{py(hl):.1f}" '
                   f'x2="{px(xl):.1f}" y2="{py(h):.1f}" stroke="black"/>')
        out.append(f'<line x1="{px(xr):.1f}" y1="{py(hr):.1f}" '
                   f'x2="{px(xr):.1f}" y2="{py(h):.1f}" stroke="black"/>')
        out.append(f'<line x1="{px(xl):.1f}" y1="{py(h):.1f}" '
                   f'x2="{px(xr):.1f}" y2="{py(h):.1f}" stroke="black"/>')
        nid = I + m.step - 1
        node_x[nid] = (xl + xr) / 2
        node_h[nid] = h
    for leaf in range(I):
        x = px(node_x[leaf])
        out.append(f'<text x="{x:.1f}" y="{_H - _MB + 12}" text-anchor="end" '
                   f'transform="rotate(-45 {x:.1f} {_H - _MB + 12})">'
                   f'{_esc(dendrogram.leaves[leaf])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
