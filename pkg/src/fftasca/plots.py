"""Static SVG emission for line and scatter plots.

Pure string construction: identical input produces byte-identical output.
Series are named; lines get one polyline each, scatter groups get one
marker group each, and every named series lands in the legend.
"""

import numpy as np

from .errors import EmptySeries

__all__ = ["emit_svg"]

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
)

WIDTH, HEIGHT = 720, 440
MARGIN = 56


def _fmt(v):
    return f"{v:.6g}"


def _normalize(series, kind):
    """Coerce each entry to an (x, y) float pair of equal length."""
    out = {}
    for name, data in series.items():
        if isinstance(data, tuple) and len(data) == 2:
            x = np.asarray(data[0], dtype=float)
            y = np.asarray(data[1], dtype=float)
        else:
            y = np.asarray(data, dtype=float)
            x = np.arange(y.size, dtype=float)
        if x.size == 0 or y.size == 0 or x.size != y.size:
            raise EmptySeries(f"series '{name}' is empty or mismatched")
        out[str(name)] = (x, y)
    if not out:
        raise EmptySeries(f"no series given for {kind} plot")
    return out


def _scaler(lo, hi, a, b):
    span = hi - lo
    if span == 0:
        span = 1.0
        lo -= 0.5
    return lambda v: a + (v - lo) / span * (b - a)


def emit_svg(series, kind="line", title="", x_label="", y_label=""):
    """Render named series to a self-contained SVG document string.

    ``series`` maps a name to either a 1-D array of y values (x becomes
    0..n-1) or an (x, y) pair of equal-length arrays.  ``kind`` is
    ``"line"`` or ``"scatter"``.
    """
    if kind not in ("line", "scatter"):
        raise ValueError(f"unknown plot kind '{kind}'")
    data = _normalize(series, kind)

    xs = np.concatenate([x for x, _ in data.values()])
    ys = np.concatenate([y for _, y in data.values()])
    sx = _scaler(float(xs.min()), float(xs.max()), MARGIN, WIDTH - MARGIN)
    sy = _scaler(float(ys.min()), float(ys.max()), HEIGHT - MARGIN, MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black" stroke-width="1"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="15">{title}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{WIDTH // 2}" y="{HEIGHT - 14}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="16" y="{HEIGHT // 2}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 16 {HEIGHT // 2})">{y_label}</text>'
        )
    # axis extent labels
    parts.append(
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 16}" font-family="sans-serif" '
        f'font-size="10">{_fmt(float(xs.min()))}</text>'
    )
    parts.append(
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 16}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{_fmt(float(xs.max()))}</text>'
    )
    parts.append(
        f'<text x="{MARGIN - 4}" y="{HEIGHT - MARGIN}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{_fmt(float(ys.min()))}</text>'
    )
    parts.append(
        f'<text x="{MARGIN - 4}" y="{MARGIN + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{_fmt(float(ys.max()))}</text>'
    )

    for idx, (name, (x, y)) in enumerate(data.items()):
        color = PALETTE[idx % len(PALETTE)]
        if kind == "line":
            points = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(x, y))
            parts.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                f'points="{points}"><title>{name}</title></polyline>'
            )
        else:
            marks = "".join(
                f'<circle cx="{_fmt(sx(a))}" cy="{_fmt(sy(b))}" r="3.5"/>'
                for a, b in zip(x, y)
            )
            parts.append(
                f'<g fill="{color}" fill-opacity="0.85" data-series="{name}">'
                f"{marks}</g>"
            )
        ly = MARGIN + 16 * idx
        parts.append(
            f'<rect x="{WIDTH - MARGIN - 132}" y="{ly - 9}" width="10" height="10" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text x="{WIDTH - MARGIN - 118}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">{name}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
