"""Minimal SVG rendering of values along a network.

Each edge is drawn as one ``<g class="edge" data-edge="e">`` group, split at
the points that carry values so the colour follows the field along the edge.
"""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import quoteattr

import numpy as np

from .network import LinearNetwork, NetworkPoint

# anchor colours of a viridis-like ramp, low to high
_RAMP = np.array([
    (68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37),
], dtype=float)


def ramp_colour(x: float) -> str:
    x = min(max(float(x), 0.0), 1.0) * (len(_RAMP) - 1)
    i = min(int(x), len(_RAMP) - 2)
    c = _RAMP[i] + (x - i) * (_RAMP[i + 1] - _RAMP[i])
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


def _edge_profiles(network: LinearNetwork, points, values):
    """Per edge, sorted (offset, value) knots including interpolated endpoints."""
    per_edge: dict[int, list] = {}
    vertex_val: dict[int, list] = {}
    for p, v in zip(points, values):
        vtx = network.point_vertex(p)
        if vtx is None:
            per_edge.setdefault(p.edge, []).append((p.offset, float(v)))
        else:
            vertex_val.setdefault(vtx, []).append(float(v))
    out = {}
    for e in range(network.n_edges):
        u, w = (int(x) for x in network.edges[e])
        knots = sorted(per_edge.get(e, []))
        L = float(network.lengths[e])
        if u in vertex_val:
            knots.insert(0, (0.0, float(np.mean(vertex_val[u]))))
        if w in vertex_val:
            knots.append((L, float(np.mean(vertex_val[w]))))
        out[e] = knots
    return out


def render_svg(network: LinearNetwork, points: Sequence[NetworkPoint] = (),
               values=None, events: Sequence[NetworkPoint] = (),
               thickness=None, size: int = 600, margin: int = 20) -> str:
    """SVG document showing ``values`` as colour and optionally ``thickness``.

    ``thickness`` maps a value array (same order as ``points``) to stroke
    width; ``events`` are drawn as small circles.
    """
    V = network.vertices
    lo, hi = V.min(axis=0), V.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    scale = (size - 2 * margin) / span
    height = int(round((hi[1] - lo[1]) * scale + 2 * margin))

    def xy(p):
        x, y = p
        return margin + (x - lo[0]) * scale, height - margin - (y - lo[1]) * scale

    if values is not None and len(values):
        values = np.asarray(values, dtype=float)
        vmin, vmax = float(values.min()), float(values.max())
        norm = (lambda v: (v - vmin) / (vmax - vmin)) if vmax > vmin else (lambda v: 0.5)
        profiles = _edge_profiles(network, points, values)
        if thickness is not None:
            th = np.asarray(thickness, dtype=float)
            tmin, tmax = float(th.min()), float(th.max())
            tprof = _edge_profiles(network, points, th)
        else:
            tprof = None
    else:
        profiles, tprof = {}, None

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{height}" '
        f'viewBox="0 0 {size} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for e in range(network.n_edges):
        u, w = network.edges[e]
        L = float(network.lengths[e])
        pu, pw = V[u], V[w]
        knots = profiles.get(e, [])
        parts.append(f'<g class="edge" data-edge={quoteattr(str(e))}>')
        if not knots:
            (x0, y0), (x1, y1) = xy(pu), xy(pw)
            parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y1:.2f}" '
                         f'stroke="#bbbbbb" stroke-width="1.5"/>')
        else:
            offs = [0.0] + [k[0] for k in knots] + [L]
            vals = [knots[0][1]] + [k[1] for k in knots] + [knots[-1][1]]
            if tprof is not None:
                tk = tprof[e]
                tv = [tk[0][1]] + [k[1] for k in tk] + [tk[-1][1]]
            for k in range(len(offs) - 1):
                if offs[k + 1] <= offs[k]:
                    continue
                (x0, y0) = xy(pu + (pw - pu) * offs[k] / L)
                (x1, y1) = xy(pu + (pw - pu) * offs[k + 1] / L)
                colour = ramp_colour(norm(0.5 * (vals[k] + vals[k + 1])))
                if tprof is not None:
                    t = 0.5 * (tv[k] + tv[k + 1])
                    width = 1.0 + 7.0 * ((t - tmin) / (tmax - tmin) if tmax > tmin else 0.5)
                else:
                    width = 3.0
                parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y1:.2f}" '
                             f'stroke="{colour}" stroke-width="{width:.2f}" '
                             f'stroke-linecap="round"/>')
        parts.append("</g>")
    for p in events:
        x, y = xy(network.point_xy(p))
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.5" fill="black" '
                     f'fill-opacity="0.7"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
