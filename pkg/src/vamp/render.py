"""Deterministic SVG pictures of scenes, paths and viewed regions.

Viewed cells are shaded yellow, obstacles gray, every path configuration gets
a thin robot outline (imaging poses drawn thicker in blue) and the goal is
dashed.  Output depends only on the inputs, so repeated renders are
byte-identical.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .postprocess import AnnotatedPath, validate_path
from .robot import Configuration

PX_PER_M = 40.0


def _fmt(x):
    s = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _runs(mask):
    """Horizontal runs ``(row, col_start, length)`` of True cells."""
    out = []
    for r in range(mask.shape[0]):
        row = np.concatenate(([False], mask[r], [False]))
        d = np.flatnonzero(np.diff(row.astype(np.int8)))
        for a, b in zip(d[::2], d[1::2]):
            out.append((r, int(a), int(b - a)))
    return out


def _outline(scene, q):
    x, y, th = scene.lattice.pose(q)
    hx, hy = scene.robot.half_extents
    c, s = math.cos(th), math.sin(th)
    pts = [(x + c * u - s * w, y + s * u + c * w) for u, w in ((hx, hy), (-hx, hy), (-hx, -hy), (hx, -hy))]
    return pts, (x, y, th)


def render_svg(scene, result, annotated=None, out=None, v0=None):
    """Render ``result`` (a PathResult or a configuration list) over ``scene``.

    The shaded region is what the path has viewed, replayed with imaging only
    at the flagged poses when ``annotated`` is given.  Returns the SVG text
    and writes it to ``out`` if a path is given.
    """
    path = result.path if hasattr(result, "path") else result
    if not path:
        raise ValueError("nothing to render: empty path")
    path = [Configuration(*q) for q in path]
    flags = None
    if annotated is not None:
        if not isinstance(annotated, AnnotatedPath) or len(annotated.take_image) != len(path):
            raise ValueError("annotation does not match the path")
        flags = list(annotated.take_image)
    grid = scene.grid
    viewed = validate_path(scene, path, v0, flags).viewed_timeline[-1]

    xmin, ymin, xmax, ymax = grid.bounds
    W, H = (xmax - xmin) * PX_PER_M, (ymax - ymin) * PX_PER_M

    def X(x):
        return _fmt((x - xmin) * PX_PER_M)

    def Y(y):
        return _fmt((ymax - y) * PX_PER_M)

    cs = grid.cell_size * PX_PER_M
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(W)}" height="{_fmt(H)}" '
        f'viewBox="0 0 {_fmt(W)} {_fmt(H)}">',
        f"<title>{escape(scene.name or 'scene')}</title>",
        f'<rect class="background" x="0" y="0" width="{_fmt(W)}" height="{_fmt(H)}" fill="white"/>',
        '<g class="viewed" fill="#ffe680" stroke="none">',
    ]
    for r, c, n in _runs(viewed.to_mask() & ~grid.obstacles):
        x0 = xmin + c * grid.cell_size
        y1 = ymin + (r + 1) * grid.cell_size
        lines.append(f'<rect x="{X(x0)}" y="{Y(y1)}" width="{_fmt(n * cs)}" height="{_fmt(cs)}"/>')
    lines.append("</g>")
    lines.append('<g class="obstacles" fill="#777777" stroke="#333333" stroke-width="1">')
    for poly in scene.obstacles:
        pts = " ".join(f"{X(x)},{Y(y)}" for x, y in poly)
        lines.append(f'<polygon points="{pts}"/>')
    lines.append("</g>")

    goal = scene.goal
    goal_qs = sorted(goal.configs) if goal.configs is not None else [goal.target]
    lines.append('<g class="goal" fill="none" stroke="#008800" stroke-width="2" stroke-dasharray="6,4">')
    for q in goal_qs:
        pts, _ = _outline(scene, q)
        lines.append(f'<polygon points="{" ".join(f"{X(x)},{Y(y)}" for x, y in pts)}"/>')
    lines.append("</g>")

    lines.append('<g class="path" fill="none">')
    for i, q in enumerate(path):
        pts, (x, y, th) = _outline(scene, q)
        imaging = flags is not None and flags[i]
        cls = "robot imaging" if imaging else "robot"
        stroke = 'stroke="#1f4fd1" stroke-width="2"' if imaging else 'stroke="#cc2222" stroke-width="0.6"'
        poly = " ".join(f"{X(px)},{Y(py)}" for px, py in pts)
        lines.append(f'<polygon class="{cls}" {stroke} points="{poly}"/>')
        hx = scene.robot.half_extents[0]
        lines.append(
            f'<line class="heading" stroke="#cc2222" stroke-width="0.6" x1="{X(x)}" y1="{Y(y)}" '
            f'x2="{X(x + hx * math.cos(th))}" y2="{Y(y + hx * math.sin(th))}"/>'
        )
    lines.append("</g>")
    lines.append("</svg>")
    svg = "\n".join(lines) + "\n"
    if out is not None:
        with open(out, "w") as fh:
            fh.write(svg)
    return svg
