"""Deterministic SVG maps of the parameter domain.

Each chart of a surface is drawn as a square panel: cells filled by
curvature sign (elliptic light, hyperbolic dark), the parabolic curve
solid, the flecnodal curve dashed, and characteristic points as markers
(ellipnode circle, hyperbonode square, godron triangle; positive filled,
negative hollow).  Element order is fixed and floats are printed at six
significant digits, so identical inputs produce identical bytes.
"""

from __future__ import annotations

import numpy as np

from .topology import _center_signs

__all__ = ["render_svg"]

PANEL = 220.0
PAD = 18.0
LABEL_H = 16.0
LEGEND_H = 48.0
FILL_ELLIPTIC = "#f2e9d8"
FILL_HYPERBOLIC = "#5a6f8f"
PARABOLIC_STYLE = 'fill="none" stroke="#101010" stroke-width="1.6"'
FLECNODAL_STYLE = (
    'fill="none" stroke="#1a6b3c" stroke-width="1.2" stroke-dasharray="5 3"'
)
MARKER_STROKE = "#101010"
MARKER_FILL = "#d43a33"
MARKER_R = 4.5


def _fmt(x):
    v = float(x)
    if v == 0.0:
        v = 0.0  # normalise -0
    return format(v, ".6g")


def _panels(spec):
    """Chart name -> (origin x, origin y, domain) in fixed reading order."""
    charts = spec.charts()
    ncols = min(3, len(charts))
    out = {}
    for k, chart in enumerate(charts):
        row, col = divmod(k, ncols)
        ox = PAD + col * (PANEL + PAD)
        oy = PAD + LABEL_H + row * (PANEL + LABEL_H + PAD)
        out[chart] = (ox, oy, spec.domain(chart))
    nrows = (len(charts) + ncols - 1) // ncols
    width = max(PAD + ncols * (PANEL + PAD), 500.0)
    height = PAD + nrows * (LABEL_H + PANEL + PAD) + LEGEND_H
    return out, width, height


def _to_xy(panel, u, v):
    ox, oy, (u0, u1, v0, v1) = panel
    x = ox + (u - u0) / (u1 - u0) * PANEL
    y = oy + (1.0 - (v - v0) / (v1 - v0)) * PANEL
    return x, y


def _wrap(spec, chart, p):
    u0, u1, v0, v1 = spec.domain(chart)
    per_u, per_v = spec.periodic(chart)
    u, v = float(p[0]), float(p[1])
    if per_u:
        u = (u - u0) % (u1 - u0) + u0
    if per_v:
        v = (v - v0) % (v1 - v0) + v0
    return u, v


def _region_rects(spec, chart, panel, grid, parts):
    """Row-merged sign raster; one rect per run of constant sign."""
    signs, _ = _center_signs(spec, chart, grid)
    u0, u1, v0, v1 = panel[2]
    du = (u1 - u0) / grid
    dv = (v1 - v0) / grid
    for j in range(grid):
        i = 0
        while i < grid:
            s = signs[i, j]
            i1 = i
            while i1 + 1 < grid and signs[i1 + 1, j] == s:
                i1 += 1
            xa, ya = _to_xy(panel, u0 + i * du, v0 + (j + 1) * dv)
            xb, yb = _to_xy(panel, u0 + (i1 + 1) * du, v0 + j * dv)
            fill = FILL_ELLIPTIC if s > 0 else FILL_HYPERBOLIC
            parts.append(
                f'<rect x="{_fmt(xa)}" y="{_fmt(ya)}" width="{_fmt(xb - xa)}"'
                f' height="{_fmt(yb - ya)}" fill="{fill}"/>'
            )
            i = i1 + 1


def _polyline_pieces(spec, pl):
    """Per-chart, seam-free pieces of a traced polyline (wrapped params)."""
    pts = pl.params
    charts = list(pl.charts)
    if pl.closed and len(pl) > 1:
        pts = np.vstack([pts, pts[:1]])
        charts.append(charts[0])
    pieces = []
    cur_chart = charts[0]
    cur = [_wrap(spec, cur_chart, pts[0])]
    for k in range(1, len(pts)):
        ch = charts[k]
        p = _wrap(spec, ch, pts[k])
        if ch != cur_chart:
            pieces.append((cur_chart, cur))
            cur_chart, cur = ch, [p]
            continue
        per = spec.periodic(ch)
        u0, u1, v0, v1 = spec.domain(ch)
        spans = (u1 - u0, v1 - v0)
        last = cur[-1]
        if any(per[a] and abs(p[a] - last[a]) > 0.5 * spans[a] for a in (0, 1)):
            pieces.append((cur_chart, cur))  # drop the seam-crossing segment
            cur = [p]
        else:
            cur.append(p)
    pieces.append((cur_chart, cur))
    return [(ch, seg) for ch, seg in pieces if len(seg) >= 2]


def _curve_paths(spec, panels, trace, style, parts):
    if trace is None:
        return
    for pl in trace.polylines:
        for chart, seg in _polyline_pieces(spec, pl):
            panel = panels[chart]
            coords = " ".join(
                f"{_fmt(x)},{_fmt(y)}"
                for x, y in (_to_xy(panel, u, v) for u, v in seg)
            )
            parts.append(f'<polyline points="{coords}" {style}/>')


def _marker(kind, x, y, positive, parts):
    fill = MARKER_FILL if positive else "none"
    style = f'fill="{fill}" stroke="{MARKER_STROKE}" stroke-width="1.3"'
    r = MARKER_R
    if kind == "ellipnode":
        parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" {style}/>')
    elif kind == "hyperbonode":
        parts.append(
            f'<rect x="{_fmt(x - r)}" y="{_fmt(y - r)}" width="{_fmt(2 * r)}"'
            f' height="{_fmt(2 * r)}" {style}/>'
        )
    else:  # godron
        h = r * 1.25
        pts = f"{_fmt(x)},{_fmt(y - h)} {_fmt(x - h)},{_fmt(y + h * 0.75)} {_fmt(x + h)},{_fmt(y + h * 0.75)}"
        parts.append(f'<polygon points="{pts}" {style}/>')


def _legend(width, height, parts):
    text = 'font-family="sans-serif" font-size="11" fill="#101010"'
    y = height - LEGEND_H + 14.0
    x = PAD
    parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(y - 9)}" width="14" height="12" fill="{FILL_ELLIPTIC}" stroke="#888"/>')
    parts.append(f'<text x="{_fmt(x + 18)}" y="{_fmt(y + 4)}" {text}>elliptic</text>')
    x += 80.0
    parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(y - 9)}" width="14" height="12" fill="{FILL_HYPERBOLIC}" stroke="#888"/>')
    parts.append(f'<text x="{_fmt(x + 18)}" y="{_fmt(y + 4)}" {text}>hyperbolic</text>')
    x += 96.0
    parts.append(f'<line x1="{_fmt(x)}" y1="{_fmt(y - 3)}" x2="{_fmt(x + 22)}" y2="{_fmt(y - 3)}" stroke="#101010" stroke-width="1.6"/>')
    parts.append(f'<text x="{_fmt(x + 26)}" y="{_fmt(y + 4)}" {text}>parabolic</text>')
    x += 96.0
    parts.append(f'<line x1="{_fmt(x)}" y1="{_fmt(y - 3)}" x2="{_fmt(x + 22)}" y2="{_fmt(y - 3)}" stroke="#1a6b3c" stroke-width="1.2" stroke-dasharray="5 3"/>')
    parts.append(f'<text x="{_fmt(x + 26)}" y="{_fmt(y + 4)}" {text}>flecnodal</text>')
    y += 20.0
    x = PAD
    _marker("ellipnode", x + 5, y - 3, True, parts)
    parts.append(f'<text x="{_fmt(x + 14)}" y="{_fmt(y + 4)}" {text}>ellipnode</text>')
    x += 86.0
    _marker("hyperbonode", x + 5, y - 3, True, parts)
    parts.append(f'<text x="{_fmt(x + 14)}" y="{_fmt(y + 4)}" {text}>hyperbonode</text>')
    x += 104.0
    _marker("godron", x + 5, y - 3, True, parts)
    parts.append(f'<text x="{_fmt(x + 14)}" y="{_fmt(y + 4)}" {text}>godron</text>')
    x += 72.0
    parts.append(f'<text x="{_fmt(x)}" y="{_fmt(y + 4)}" {text}>positive filled, negative hollow</text>')


def render_svg(spec, out, grid=48, parabolic=None, flecnodal=None, points=None):
    """Write the parameter-domain map of spec to out; returns the bytes."""
    panels, width, height = _panels(spec)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}"'
        f' height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<rect x="0" y="0" width="{_fmt(width)}" height="{_fmt(height)}" fill="#ffffff"/>',
    ]
    parts.append('<g shape-rendering="crispEdges">')
    for chart in spec.charts():
        _region_rects(spec, chart, panels[chart], grid, parts)
    parts.append("</g>")
    _curve_paths(spec, panels, parabolic, PARABOLIC_STYLE, parts)
    _curve_paths(spec, panels, flecnodal, FLECNODAL_STYLE, parts)

    markers = []
    for pt in points or ():
        u, v = _wrap(spec, pt.chart, pt.param)
        signed = pt.sign if pt.sign is not None else pt.index
        positive = signed is not None and signed > 0
        markers.append((pt.kind, pt.chart, round(u, 9), round(v, 9), positive))
    for kind, chart, u, v, positive in sorted(markers):
        x, y = _to_xy(panels[chart], u, v)
        _marker(kind, x, y, positive, parts)

    for chart in spec.charts():
        ox, oy, _ = panels[chart]
        parts.append(
            f'<rect x="{_fmt(ox)}" y="{_fmt(oy)}" width="{_fmt(PANEL)}"'
            f' height="{_fmt(PANEL)}" fill="none" stroke="#404040" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(ox)}" y="{_fmt(oy - 4)}" font-family="sans-serif"'
            f' font-size="11" fill="#101010">chart {chart}</text>'
        )
    _legend(width, height, parts)
    parts.append("</svg>")
    data = ("\n".join(parts) + "\n").encode("utf-8")
    with open(out, "wb") as fh:
        fh.write(data)
    return data
