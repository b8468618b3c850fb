"""Minimal deterministic SVG line plots (no plotting library involved).

The CLI needs reproducible figures: rerunning a preset must produce
byte-identical output.  Matplotlib embeds timestamps, library versions,
and font metrics in its SVG, so this module hand-rolls the small subset we
need: linear axes with nice tick values, a polyline per curve, a fixed
color/dash palette, and a legend.  All coordinates are formatted with %.6g
so the output is stable across runs and platforms.

Curves are (label, xs, ys) triples; every curve needs at least two points
(a line plot of fewer is meaningless and almost certainly an upstream grid
mistake, so it is an error rather than a silent dot).
"""

from __future__ import annotations

import math

__all__ = ["render_svg"]

WIDTH = 720
HEIGHT = 480
MARGIN_L = 78
MARGIN_R = 24
MARGIN_T = 34
MARGIN_B = 56

PALETTE = [
    ("#000000", ""),
    ("#7b2d8b", "7,4"),
    ("#1f5bd8", ""),
    ("#1b8a3a", "7,4"),
    ("#e07b00", ""),
    ("#c42430", "7,4"),
    ("#0e7c7b", ""),
    ("#8a5a00", "7,4"),
]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _nice_ticks(lo: float, hi: float, target: int = 6):
    """Round tick positions covering [lo, hi] (simple nice-number scheme)."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("cannot build axis from non-finite range")
    if hi <= lo:
        pad = 1.0 if lo == 0.0 else abs(lo) * 0.5
        lo, hi = lo - pad, hi + pad
    span = hi - lo
    raw = span / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if span / step <= target:
            break
    start = math.floor(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 0.5 * step:
        if abs(t) < 1e-12 * step:
            t = 0.0
        ticks.append(t)
        t += step
    return ticks


def render_svg(curves, xlabel: str, ylabel: str, title: str = "") -> str:
    """Render curves [(label, xs, ys), ...] to an SVG document string."""
    if not curves:
        raise ValueError("no curves to plot")
    for label, xs, ys in curves:
        if len(xs) != len(ys):
            raise ValueError(f"curve {label!r}: x and y lengths differ")
        if len(xs) < 2:
            raise ValueError(
                f"curve {label!r} has {len(xs)} point(s); a line plot needs "
                "at least 2 (check the sweep grid)"
            )
    all_x = [x for _, xs, _ in curves for x in xs]
    all_y = [y for _, _, ys in curves for y in ys]
    if not all(math.isfinite(v) for v in all_x + all_y):
        raise ValueError("non-finite data point in plot input")
    xt = _nice_ticks(min(all_x), max(all_x))
    y_lo = min(min(all_y), 0.0)
    yt = _nice_ticks(y_lo, max(all_y))
    x0, x1 = xt[0], xt[-1]
    y0, y1 = yt[0], yt[-1]
    px0, px1 = MARGIN_L, WIDTH - MARGIN_R
    py0, py1 = HEIGHT - MARGIN_B, MARGIN_T

    def sx(x):
        return px0 + (x - x0) / (x1 - x0) * (px1 - px0)

    def sy(y):
        return py0 + (y - y0) / (y1 - y0) * (py1 - py0)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    # axes frame
    parts.append(
        f'<rect x="{_fmt(px0)}" y="{_fmt(py1)}" width="{_fmt(px1 - px0)}" '
        f'height="{_fmt(py0 - py1)}" fill="none" stroke="#333333" stroke-width="1"/>'
    )
    # grid + ticks + tick labels
    for t in xt:
        X = _fmt(sx(t))
        parts.append(
            f'<line x1="{X}" y1="{_fmt(py0)}" x2="{X}" y2="{_fmt(py1)}" '
            f'stroke="#dddddd" stroke-width="0.7"/>'
        )
        parts.append(
            f'<text x="{X}" y="{_fmt(py0 + 18)}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif">{_fmt(t)}</text>'
        )
    for t in yt:
        Y = _fmt(sy(t))
        parts.append(
            f'<line x1="{_fmt(px0)}" y1="{Y}" x2="{_fmt(px1)}" y2="{Y}" '
            f'stroke="#dddddd" stroke-width="0.7"/>'
        )
        parts.append(
            f'<text x="{_fmt(px0 - 6)}" y="{Y}" font-size="12" text-anchor="end" '
            f'dominant-baseline="middle" font-family="sans-serif">{_fmt(t)}</text>'
        )
    # curves
    for i, (label, xs, ys) in enumerate(curves):
        color, dash = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(xs, ys))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.6"{dash_attr}/>'
        )
    # legend (top-right, inside the frame)
    lx = px1 - 170
    ly = py1 + 14
    for i, (label, _, _) in enumerate(curves):
        color, dash = PALETTE[i % len(PALETTE)]
        Y = ly + 17 * i
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<line x1="{_fmt(lx)}" y1="{_fmt(Y)}" x2="{_fmt(lx + 26)}" '
            f'y2="{_fmt(Y)}" stroke="{color}" stroke-width="1.6"{dash_attr}/>'
        )
        parts.append(
            f'<text x="{_fmt(lx + 32)}" y="{_fmt(Y + 4)}" font-size="12" '
            f'font-family="sans-serif">{label}</text>'
        )
    # labels
    parts.append(
        f'<text x="{_fmt(0.5 * (px0 + px1))}" y="{HEIGHT - 14}" font-size="14" '
        f'text-anchor="middle" font-family="sans-serif">{xlabel}</text>'
    )
    parts.append(
        f'<text x="20" y="{_fmt(0.5 * (py0 + py1))}" font-size="14" '
        f'text-anchor="middle" font-family="sans-serif" '
        f'transform="rotate(-90 20 {_fmt(0.5 * (py0 + py1))})">{ylabel}</text>'
    )
    if title:
        parts.append(
            f'<text x="{_fmt(0.5 * (px0 + px1))}" y="20" font-size="14" '
            f'text-anchor="middle" font-family="sans-serif">{title}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
