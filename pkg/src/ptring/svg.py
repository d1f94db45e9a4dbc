"""
Self-contained SVG 1.1 renderers: intensity heatmaps and line plots.

Heatmap colors come from a fixed black-purple-orange-yellow ramp whose
luminance increases monotonically with the value, so brighter always means
more intensity. Numbers are rounded for display only.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

__all__ = ["colormap", "heatmap_svg", "line_plot_svg"]

# (position, (r, g, b)) anchors; luminance rises monotonically
_RAMP = (
    (0.00, (0, 0, 4)),
    (0.25, (87, 16, 110)),
    (0.50, (188, 55, 84)),
    (0.75, (249, 142, 9)),
    (1.00, (252, 255, 164)),
)

_SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")

_HEADER = '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">'


def colormap(x: float) -> str:
    """Hex color for ``x`` in [0, 1] (values outside are clipped)."""
    x = min(1.0, max(0.0, float(x))) if np.isfinite(x) else 1.0
    for (x0, c0), (x1, c1) in zip(_RAMP, _RAMP[1:]):
        if x <= x1:
            f = (x - x0) / (x1 - x0)
            rgb = [round(a + f * (b - a)) for a, b in zip(c0, c1)]
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*_RAMP[-1][1])


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def _text(x, y, s, size=12, anchor="middle", rotate=None):
    transform = f' transform="rotate({rotate} {x:.1f} {y:.1f})"' if rotate is not None else ""
    return (
        f'<text x="{x:.1f}" y="{y:.1f}" font-family="sans-serif" font-size="{size}" '
        f'text-anchor="{anchor}"{transform}>{escape(s)}</text>'
    )


def _ticks(lo: float, hi: float, count: int = 5):
    if hi == lo:
        return [lo]
    return list(np.linspace(lo, hi, count))


def heatmap_svg(
    values,
    x_values,
    y_values,
    x_label: str,
    y_label: str,
    title: str = "",
    log_scale: bool = False,
    decades: float = 6.0,
    max_columns: int = 400,
) -> str:
    """Render ``values[y, x]`` with x horizontal and the first y row at the top.

    Linear scaling maps [0, max] onto the ramp; ``log_scale`` maps the top
    ``decades`` decades below the maximum instead. Columns are subsampled
    down to ``max_columns`` for file size.
    """
    values = np.asarray(values, dtype=float)
    x_values = np.asarray(x_values, dtype=float)
    y_values = np.asarray(y_values, dtype=float)
    if values.shape != (y_values.size, x_values.size):
        raise ValueError(f"values shape {values.shape} does not match axes ({y_values.size}, {x_values.size})")
    if x_values.size > max_columns:
        keep = np.unique(np.linspace(0, x_values.size - 1, max_columns).round().astype(int))
        values, x_values = values[:, keep], x_values[keep]

    finite = values[np.isfinite(values)]
    vmax = float(finite.max()) if finite.size else 1.0
    if log_scale:
        top = np.log10(vmax) if vmax > 0 else 0.0
        with np.errstate(divide="ignore"):
            scaled = (np.log10(np.where(values > 0, values, np.nan)) - (top - decades)) / decades
        scaled = np.nan_to_num(scaled, nan=0.0, posinf=1.0, neginf=0.0)
    else:
        scaled = values / vmax if vmax > 0 else np.zeros_like(values)

    ny, nx = values.shape
    left, top_m, plot_w, plot_h = 70, 40, 560, 320
    bar_x = left + plot_w + 20
    width, height = bar_x + 90, top_m + plot_h + 60
    cw, ch = plot_w / nx, plot_h / ny

    out = [_HEADER.format(w=width, h=height), '<rect width="100%" height="100%" fill="white"/>']
    if title:
        out.append(_text(left + plot_w / 2, 22, title, size=14))
    out.append('<g shape-rendering="crispEdges">')
    for iy in range(ny):
        for ix in range(nx):
            out.append(
                f'<rect x="{left + ix * cw:.2f}" y="{top_m + iy * ch:.2f}" width="{cw + 0.05:.2f}" '
                f'height="{ch + 0.05:.2f}" fill="{colormap(scaled[iy, ix])}"/>'
            )
    out.append("</g>")
    out.append(f'<rect x="{left}" y="{top_m}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>')

    for v in _ticks(x_values[0], x_values[-1]):
        frac = 0.0 if x_values[-1] == x_values[0] else (v - x_values[0]) / (x_values[-1] - x_values[0])
        x = left + frac * plot_w
        out.append(f'<line x1="{x:.1f}" y1="{top_m + plot_h}" x2="{x:.1f}" y2="{top_m + plot_h + 5}" stroke="black"/>')
        out.append(_text(x, top_m + plot_h + 18, _fmt(v), size=10))
    for iy in sorted({0, ny // 2, ny - 1}):
        y = top_m + (iy + 0.5) * ch
        out.append(_text(left - 8, y + 4, _fmt(y_values[iy]), size=10, anchor="end"))
    out.append(_text(left + plot_w / 2, height - 12, x_label))
    out.append(_text(18, top_m + plot_h / 2, y_label, rotate=-90))

    steps = 32
    for i in range(steps):
        frac = 1 - (i + 0.5) / steps
        out.append(
            f'<rect x="{bar_x}" y="{top_m + i * plot_h / steps:.2f}" width="16" '
            f'height="{plot_h / steps + 0.05:.2f}" fill="{colormap(frac)}"/>'
        )
    if log_scale:
        hi_label, lo_label = f"1e{top:.3g}", f"1e{top - decades:.3g}"
    else:
        hi_label, lo_label = _fmt(vmax), "0"
    out.append(_text(bar_x + 20, top_m + 10, hi_label, size=10, anchor="start"))
    out.append(_text(bar_x + 20, top_m + plot_h, lo_label, size=10, anchor="start"))
    out.append(_text(bar_x + 8, top_m + plot_h + 18, "log10" if log_scale else "linear", size=10))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def line_plot_svg(
    series: dict,
    x_label: str,
    y_label: str,
    title: str = "",
    references: dict | None = None,
) -> str:
    """Line plot with markers; ``series`` maps a legend label to ``(x, y)``.

    ``references`` maps labels to constant y values drawn as dashed lines.
    """
    references = references or {}
    xs = [np.asarray(x, float) for x, _ in series.values()]
    ys = [np.asarray(y, float) for _, y in series.values()] + [np.array(list(references.values()), float)]
    all_x = np.concatenate(xs) if xs else np.array([0.0, 1.0])
    all_y = np.concatenate([y[np.isfinite(y)] for y in ys]) if ys else np.array([0.0, 1.0])
    x_lo, x_hi = float(all_x.min()), float(all_x.max())
    y_lo, y_hi = float(min(all_y.min(), 0.0)), float(all_y.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    left, top, plot_w, plot_h = 70, 40, 480, 320
    width, height = left + plot_w + 170, top + plot_h + 60

    def px(x):
        return left + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return top + (1 - (y - y_lo) / (y_hi - y_lo)) * plot_h

    out = [_HEADER.format(w=width, h=height), '<rect width="100%" height="100%" fill="white"/>']
    if title:
        out.append(_text(left + plot_w / 2, 22, title, size=14))
    out.append(f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>')
    for v in _ticks(x_lo, x_hi):
        out.append(_text(px(v), top + plot_h + 18, _fmt(v), size=10))
    for v in _ticks(y_lo, y_hi):
        out.append(f'<line x1="{left - 5}" y1="{py(v):.1f}" x2="{left}" y2="{py(v):.1f}" stroke="black"/>')
        out.append(_text(left - 8, py(v) + 4, _fmt(v), size=10, anchor="end"))
    out.append(_text(left + plot_w / 2, height - 12, x_label))
    out.append(_text(18, top + plot_h / 2, y_label, rotate=-90))

    legend_y = top + 10
    for value in references.values():
        out.append(
            f'<line x1="{left}" y1="{py(value):.1f}" x2="{left + plot_w}" y2="{py(value):.1f}" '
            'stroke="gray" stroke-dasharray="4 3"/>'
        )
    for i, (label, (x, y)) in enumerate(series.items()):
        color = _SERIES_COLORS[i % len(_SERIES_COLORS)]
        pts = [(px(a), py(b)) for a, b in zip(x, y) if np.isfinite(b)]
        if len(pts) > 1:
            coords = " ".join(f"{a:.1f},{b:.1f}" for a, b in pts)
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for a, b in pts:
            out.append(f'<circle cx="{a:.1f}" cy="{b:.1f}" r="2.5" fill="{color}"/>')
        ly = legend_y + 18 * i
        out.append(f'<line x1="{left + plot_w + 15}" y1="{ly}" x2="{left + plot_w + 35}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(_text(left + plot_w + 40, ly + 4, str(label), size=11, anchor="start"))
    out.append("</svg>")
    return "\n".join(out) + "\n"
