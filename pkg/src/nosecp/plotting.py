"""Deterministic SVG rendering of detection results.

Hand-rolled SVG keeps the output byte-stable across environments: data
points, the estimated step curve as a single step-shaped polyline, and one
vertical marker per change-point.
"""

from __future__ import annotations

import numpy as np

__all__ = ["render_svg"]

_W, _H, _PAD = 900, 420, 45


def _scale(vals, lo, hi, out_lo, out_hi):
    span = hi - lo
    if span == 0:
        span = 1.0
    return out_lo + (np.asarray(vals, dtype=float) - lo) / span * (out_hi - out_lo)


def render_svg(map_curve, changepoints, states=None, data_values=None) -> str:
    """Build an SVG document as a string."""
    map_curve = np.asarray(map_curve, dtype=float)
    n = map_curve.size
    states = np.arange(1, n + 1) if states is None else np.asarray(states)
    ys = [map_curve]
    if data_values is not None:
        ys.append(np.asarray(data_values, dtype=float))
    y_all = np.concatenate(ys)
    y_lo, y_hi = float(y_all.min()), float(y_all.max())
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    x_lo, x_hi = float(states[0]), float(states[-1])

    xs = _scale(states, x_lo, x_hi, _PAD, _W - _PAD)
    yc = _scale(map_curve, y_lo, y_hi, _H - _PAD, _PAD)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    if data_values is not None:
        yd = _scale(np.asarray(data_values, dtype=float), y_lo, y_hi, _H - _PAD, _PAD)
        dots = " ".join(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="1.5" fill="#888"/>'
            for x, y in zip(xs[:len(yd)], yd))
        parts.append(dots)
    for cp in np.asarray(changepoints, dtype=float):
        x = float(_scale([cp], x_lo, x_hi, _PAD, _W - _PAD)[0])
        parts.append(f'<line x1="{x:.2f}" y1="{_PAD}" x2="{x:.2f}" '
                     f'y2="{_H - _PAD}" stroke="#d33" stroke-dasharray="4 3"/>')
    # step-shaped polyline: horizontal run per state, risers at value changes
    pts = [f"{xs[0]:.2f},{yc[0]:.2f}"]
    for i in range(1, n):
        pts.append(f"{xs[i]:.2f},{yc[i - 1]:.2f}")
        pts.append(f"{xs[i]:.2f},{yc[i]:.2f}")
    parts.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                 f'stroke="#135" stroke-width="1.8"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
