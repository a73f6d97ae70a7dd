"""
Error plots: relative L2 error against time on a logarithmic axis with the
bk-only, PBDW-with-true-observations and SVDA curves.

The SVG is written directly; an interactive Plotly HTML companion is
written next to it.
"""

import math
from xml.sax.saxutils import escape

import numpy as np
import plotly.graph_objects as go

from utils.exceptions import ReportError

CURVES = [
    ('err_bk_L2', 'bk only', '#ef4444'),
    ('err_star_L2', 'PBDW (true observations)', '#3b82f6'),
    ('err_svda_L2', 'SVDA', '#10b981'),
]

WIDTH, HEIGHT = 720, 440
LEFT, RIGHT, TOP, BOTTOM = 80, 200, 40, 60


def _log_range(columns):
    positive = np.concatenate([c[c > 0] for c in columns])
    if positive.size == 0:
        return -1.0, 0.0
    low = math.floor(math.log10(positive.min()))
    high = math.ceil(math.log10(positive.max()))
    return float(low), float(max(high, low + 1))


def _curve_columns(frame):
    missing = [name for name, _, _ in CURVES if name not in frame.columns] + \
        (['t'] if 't' not in frame.columns else [])
    if missing:
        raise ReportError(f"error CSV lacks columns {missing}")
    if frame.empty:
        raise ReportError("error CSV has no rows")
    return [frame[name].to_numpy(dtype=float) for name, _, _ in CURVES]


def render_svg(frame, title="Relative L2 error"):
    """
    SVG document of the three error curves.

    Each polyline carries data-column, data-ymin and data-ymax attributes
    with the extreme values of its CSV column.
    """
    columns = _curve_columns(frame)
    t = frame['t'].to_numpy(dtype=float)
    t0, t1 = float(t.min()), float(t.max())
    if t1 == t0:
        t1 = t0 + 1.0
    low, high = _log_range(columns)
    floor = 10.0 ** low
    plot_w = WIDTH - LEFT - RIGHT
    plot_h = HEIGHT - TOP - BOTTOM

    def sx(value):
        return LEFT + (value - t0) / (t1 - t0) * plot_w

    def sy(value):
        exponent = math.log10(max(value, floor))
        return TOP + (high - exponent) / (high - low) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="white"/>',
        f'<text x="{LEFT + plot_w / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#334155"/>',
    ]
    for exponent in range(int(low), int(high) + 1):
        y = sy(10.0 ** exponent)
        parts.append(f'<line x1="{LEFT}" y1="{y:.3f}" x2="{LEFT + plot_w}" y2="{y:.3f}" '
                     f'stroke="#e2e8f0"/>')
        parts.append(f'<text x="{LEFT - 8}" y="{y + 4:.3f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">1e{exponent}</text>')
    for tick in np.linspace(t0, t1, 6):
        x = sx(tick)
        parts.append(f'<text x="{x:.3f}" y="{TOP + plot_h + 18}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{tick:.2f}</text>')
    parts.append(f'<text x="{LEFT + plot_w / 2:.1f}" y="{HEIGHT - 16}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12">time (s)</text>')

    for (name, label, color), values in zip(CURVES, columns):
        points = " ".join(f"{sx(a):.3f},{sy(b):.3f}" for a, b in zip(t, values))
        parts.append(
            f'<polyline data-column="{name}" data-ymin="{values.min()!r}" '
            f'data-ymax="{values.max()!r}" fill="none" stroke="{color}" '
            f'stroke-width="2" points="{points}"/>'
        )

    for i, (_, label, color) in enumerate(CURVES):
        y = TOP + 16 + 20 * i
        x = LEFT + plot_w + 14
        parts.append(f'<line x1="{x}" y1="{y}" x2="{x + 24}" y2="{y}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{x + 30}" y="{y + 4}" font-family="sans-serif" '
                     f'font-size="11">{escape(label)}</text>')
    parts.append('</svg>')
    return "\n".join(parts) + "\n"


def write_svg(frame, path, title="Relative L2 error"):
    with open(path, 'w') as handle:
        handle.write(render_svg(frame, title))
    return path


def error_figure(frame, title="Relative L2 error"):
    columns = _curve_columns(frame)
    fig = go.Figure()
    for (name, label, color), values in zip(CURVES, columns):
        fig.add_trace(go.Scatter(
            x=frame['t'],
            y=values,
            mode='lines',
            name=label,
            line=dict(color=color, width=2),
        ))
    fig.update_layout(
        template='plotly_white',
        title=title,
        height=HEIGHT,
        margin=dict(l=20, r=20, t=50, b=20),
        xaxis_title="time (s)",
        yaxis_title="relative L2 error",
        yaxis_type="log",
    )
    return fig


def write_html(frame, path, title="Relative L2 error"):
    error_figure(frame, title).write_html(path, include_plotlyjs='cdn', div_id='svda-errors')
    return path
