"""Tiny deterministic SVG plotting (no display dependency).

Hand-rolled so identical inputs produce identical bytes; enough for
accuracy-vs-SNR curves, confusion-matrix heatmaps, and I/Q trace panels.
"""

from __future__ import annotations

import numpy as np

__all__ = ["line_chart", "heatmap", "iq_panels"]

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def _f(x) -> str:
    return f"{float(x):.2f}"


def _svg(width, height, body) -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        '<rect width="100%" height="100%" fill="white"/>\n'
        + body + "</svg>\n"
    )


def line_chart(path, series, title="", xlabel="", ylabel="", ylim=None,
               width=640, height=420):
    """series: list of (label, xs, ys, stds-or-None); stds draw error bars."""
    ml, mr, mt, mb = 60, 20, 40, 50
    pw, ph = width - ml - mr, height - mt - mb
    all_x = np.concatenate([np.asarray(s[1], float) for s in series])
    all_y = np.concatenate([np.asarray(s[2], float) for s in series])
    x0, x1 = all_x.min(), all_x.max()
    if ylim is None:
        y0, y1 = all_y.min(), all_y.max()
        pad = 0.05 * max(y1 - y0, 1e-9)
        y0, y1 = y0 - pad, y1 + pad
    else:
        y0, y1 = ylim
    if x1 == x0:
        x1 = x0 + 1.0

    def px(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def py(y):
        return mt + (1.0 - (y - y0) / (y1 - y0)) * ph

    body = [f'<g font-family="sans-serif" font-size="12">']
    body.append(f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" '
                'fill="none" stroke="#999"/>')
    if title:
        body.append(f'<text x="{width / 2:.0f}" y="24" text-anchor="middle" '
                    f'font-size="15">{title}</text>')
    if xlabel:
        body.append(f'<text x="{width / 2:.0f}" y="{height - 12}" '
                    f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        body.append(f'<text x="16" y="{height / 2:.0f}" text-anchor="middle" '
                    f'transform="rotate(-90 16 {height / 2:.0f})">{ylabel}</text>')
    for i in range(5):
        yv = y0 + (y1 - y0) * i / 4
        body.append(f'<text x="{ml - 6}" y="{_f(py(yv) + 4)}" text-anchor="end">'
                    f'{yv:.2f}</text>')
    for xv in np.unique(all_x):
        body.append(f'<text x="{_f(px(xv))}" y="{height - mb + 16}" '
                    f'text-anchor="middle" font-size="10">{xv:g}</text>')
    for i, (label, xs, ys, stds) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_f(px(x))},{_f(py(y))}" for x, y in zip(xs, ys))
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                    'stroke-width="1.8"/>')
        if stds is not None:
            for x, y, s in zip(xs, ys, stds):
                body.append(f'<line x1="{_f(px(x))}" y1="{_f(py(y - s))}" '
                            f'x2="{_f(px(x))}" y2="{_f(py(y + s))}" '
                            f'stroke="{color}" stroke-width="1"/>')
        body.append(f'<text x="{ml + 10}" y="{mt + 16 + 16 * i}" fill="{color}">'
                    f'{label}</text>')
    body.append("</g>\n")
    _write(path, _svg(width, height, "\n".join(body)))


def heatmap(path, matrix, labels, title="", width=520, height=520):
    """Row-normalized square heatmap with class labels on both axes."""
    m = np.asarray(matrix, float)
    n = m.shape[0]
    ml, mt = 90, 70
    cell = (width - ml - 20) / n
    body = [f'<g font-family="sans-serif" font-size="11">']
    if title:
        body.append(f'<text x="{width / 2:.0f}" y="22" text-anchor="middle" '
                    f'font-size="14">{title}</text>')
    for i in range(n):
        for j in range(n):
            v = max(0.0, min(1.0, m[i, j]))
            # white -> blue ramp
            r = int(round(255 * (1 - v)))
            g = int(round(255 * (1 - 0.6 * v)))
            body.append(
                f'<rect x="{_f(ml + j * cell)}" y="{_f(mt + i * cell)}" '
                f'width="{_f(cell)}" height="{_f(cell)}" fill="rgb({r},{g},255)"/>'
            )
            if v >= 0.005:
                body.append(
                    f'<text x="{_f(ml + (j + 0.5) * cell)}" y="{_f(mt + (i + 0.62) * cell)}" '
                    f'text-anchor="middle" font-size="8">{v:.2f}</text>'
                )
    for i, lab in enumerate(labels):
        body.append(f'<text x="{ml - 6}" y="{_f(mt + (i + 0.62) * cell)}" '
                    f'text-anchor="end">{lab}</text>')
        body.append(
            f'<text x="{_f(ml + (i + 0.5) * cell)}" y="{mt - 8}" text-anchor="start" '
            f'transform="rotate(-45 {_f(ml + (i + 0.5) * cell)} {mt - 8})" '
            f'font-size="10">{lab}</text>'
        )
    body.append("</g>\n")
    _write(path, _svg(width, height, "\n".join(body)))


def iq_panels(path, panels, width_per=300, height_per=150, cols=2):
    """Grid of I/Q trace panels.

    ``panels`` is a list of (title, traces) where traces is a list of
    (label, (2, N) array); I row drawn blue, Q row orange, one pair of
    lines per trace (second trace dashed).
    """
    rows = (len(panels) + cols - 1) // cols
    width = cols * width_per
    height = rows * height_per
    body = ['<g font-family="sans-serif" font-size="11">']
    for p, (title, traces) in enumerate(panels):
        ox = (p % cols) * width_per
        oy = (p // cols) * height_per
        ml, mt, mb = 10, 24, 8
        pw, ph = width_per - 2 * ml, height_per - mt - mb
        allv = np.concatenate([np.asarray(t[1], float).ravel() for t in traces])
        v0, v1 = allv.min(), allv.max()
        if v1 == v0:
            v1 = v0 + 1.0
        body.append(f'<text x="{ox + width_per / 2:.0f}" y="{oy + 15}" '
                    f'text-anchor="middle">{title}</text>')
        body.append(f'<rect x="{ox + ml}" y="{oy + mt}" width="{pw}" height="{ph}" '
                    'fill="none" stroke="#ccc"/>')
        for t_i, (label, arr) in enumerate(traces):
            arr = np.asarray(arr, float)
            n = arr.shape[1]
            dash = ' stroke-dasharray="4 3"' if t_i else ""
            for row, color in ((0, "#1f77b4"), (1, "#ff7f0e")):
                pts = " ".join(
                    f"{_f(ox + ml + i / (n - 1) * pw)},"
                    f"{_f(oy + mt + (1 - (arr[row, i] - v0) / (v1 - v0)) * ph)}"
                    for i in range(n)
                )
                body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                            f'stroke-width="1"{dash}/>')
    body.append("</g>\n")
    _write(path, _svg(width, height, "\n".join(body)))


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
