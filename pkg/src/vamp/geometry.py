"""Rasterized planar workspace: occupancy grids, cell sets, sight lines and distance fields.

Cells are addressed as ``(row, col)`` where ``row`` indexes the y axis and
``col`` the x axis.  A :class:`CellSet` stores membership as a Python integer
bitset (bit ``row * cols + col``), which keeps unions, intersections and
subset tests cheap enough to sit inside search inner loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

SQRT2 = math.sqrt(2.0)
_EPS = 1e-9


def mask_to_bits(mask):
    """Pack a boolean array (row-major) into an integer bitset."""
    packed = np.packbits(np.asarray(mask, dtype=bool).ravel(), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def bits_to_mask(bits, shape):
    n = shape[0] * shape[1]
    raw = bits.to_bytes((n + 7) // 8, "little")
    flat = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little", count=n)
    return flat.reshape(shape).astype(bool)


class CellSet:
    """Immutable set of cells of a grid with fixed ``shape = (rows, cols)``."""

    __slots__ = ("bits", "shape")

    def __init__(self, bits, shape):
        if bits < 0 or bits >> (shape[0] * shape[1]):
            raise ValueError("bitset has cells outside the grid")
        self.bits = bits
        self.shape = (int(shape[0]), int(shape[1]))

    @classmethod
    def empty(cls, shape):
        return cls(0, shape)

    @classmethod
    def full(cls, shape):
        return cls((1 << (shape[0] * shape[1])) - 1, shape)

    @classmethod
    def from_mask(cls, mask):
        mask = np.asarray(mask, dtype=bool)
        return cls(mask_to_bits(mask), mask.shape)

    @classmethod
    def from_cells(cls, shape, cells):
        bits = 0
        cols = shape[1]
        for r, c in cells:
            r, c = int(r), int(c)
            if not (0 <= r < shape[0] and 0 <= c < cols):
                raise ValueError(f"cell {(r, c)} outside grid of shape {shape}")
            bits |= 1 << (r * cols + c)
        return cls(bits, shape)

    def to_mask(self):
        return bits_to_mask(self.bits, self.shape)

    def _check(self, other):
        if not isinstance(other, CellSet):
            return NotImplemented
        if other.shape != self.shape:
            raise ValueError(f"cell sets over different grids: {self.shape} vs {other.shape}")
        return other

    def __or__(self, other):
        self._check(other)
        return CellSet(self.bits | other.bits, self.shape)

    def __and__(self, other):
        self._check(other)
        return CellSet(self.bits & other.bits, self.shape)

    def __sub__(self, other):
        self._check(other)
        return CellSet(self.bits & ~other.bits, self.shape)

    def __le__(self, other):
        self._check(other)
        return self.bits & ~other.bits == 0

    def __ge__(self, other):
        self._check(other)
        return other.bits & ~self.bits == 0

    def issubset(self, other):
        return self <= other

    def isdisjoint(self, other):
        self._check(other)
        return self.bits & other.bits == 0

    def __eq__(self, other):
        if not isinstance(other, CellSet):
            return NotImplemented
        return self.shape == other.shape and self.bits == other.bits

    def __hash__(self):
        return hash((self.shape, self.bits))

    def __len__(self):
        return self.bits.bit_count()

    def __bool__(self):
        return self.bits != 0

    def __contains__(self, cell):
        r, c = cell
        if not (0 <= r < self.shape[0] and 0 <= c < self.shape[1]):
            return False
        return bool(self.bits >> (r * self.shape[1] + c) & 1)

    def indices(self):
        """Flat cell indices in increasing order."""
        return np.flatnonzero(self.to_mask().ravel())

    def __iter__(self):
        cols = self.shape[1]
        for i in self.indices():
            yield (int(i) // cols, int(i) % cols)

    def __repr__(self):
        return f"CellSet(shape={self.shape}, count={len(self)})"


@dataclass(frozen=True, eq=False)
class WorkGrid:
    """Axis-aligned raster of the workspace with a known-obstacle mask.

    ``obstacles`` is a read-only boolean array of shape ``(height, width)``.
    """

    origin: tuple
    cell_size: float
    width: int
    height: int
    obstacles: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.cell_size > 0:
            raise ValueError("cell_size must be positive")
        if self.width < 1 or self.height < 1:
            raise ValueError("grid must have at least one cell")
        obs = np.array(self.obstacles, dtype=bool)
        if obs.shape != (self.height, self.width):
            raise ValueError(f"obstacle mask shape {obs.shape} != {(self.height, self.width)}")
        obs.setflags(write=False)
        object.__setattr__(self, "obstacles", obs)

    @property
    def shape(self):
        return (self.height, self.width)

    @property
    def bounds(self):
        x0, y0 = self.origin
        return (x0, y0, x0 + self.width * self.cell_size, y0 + self.height * self.cell_size)

    @property
    def cell_area(self):
        return self.cell_size * self.cell_size

    @cached_property
    def obstacle_mask(self):
        return CellSet.from_mask(self.obstacles)

    @cached_property
    def free_mask(self):
        return CellSet.from_mask(~self.obstacles)

    @cached_property
    def column_prefix(self):
        # prefix[c, r] = number of obstacle cells in column c with row < r
        pre = np.zeros((self.width, self.height + 1), dtype=np.int32)
        np.cumsum(self.obstacles.T, axis=1, out=pre[:, 1:])
        return pre

    @cached_property
    def area_prefix(self):
        # summed-area table: prefix[r, c] = obstacle cells with row < r and col < c
        pre = np.zeros((self.height + 1, self.width + 1), dtype=np.int32)
        pre[1:, 1:] = self.obstacles.cumsum(axis=0).cumsum(axis=1)
        return pre

    def empty_set(self):
        return CellSet.empty(self.shape)

    def to_cell_coords(self, x, y):
        """Continuous cell coordinates ``(u, w)``: u along columns, w along rows."""
        return ((x - self.origin[0]) / self.cell_size, (y - self.origin[1]) / self.cell_size)

    def cell_of(self, x, y):
        u, w = self.to_cell_coords(x, y)
        return (int(math.floor(w)), int(math.floor(u)))

    def cell_center(self, row, col):
        return (
            self.origin[0] + (col + 0.5) * self.cell_size,
            self.origin[1] + (row + 0.5) * self.cell_size,
        )

    def contains_point(self, x, y):
        x0, y0, x1, y1 = self.bounds
        return x0 <= x <= x1 and y0 <= y <= y1

    def set_from_rect(self, xmin, ymin, xmax, ymax):
        """Cells whose centers lie in the closed rectangle."""
        xs = self.origin[0] + (np.arange(self.width) + 0.5) * self.cell_size
        ys = self.origin[1] + (np.arange(self.height) + 0.5) * self.cell_size
        cols = (xs >= xmin - _EPS) & (xs <= xmax + _EPS)
        rows = (ys >= ymin - _EPS) & (ys <= ymax + _EPS)
        return CellSet.from_mask(rows[:, None] & cols[None, :])

    @cached_property
    def _free_graph(self):
        h, w = self.shape
        free = ~self.obstacles
        idx = np.arange(h * w).reshape(h, w)
        src, dst, wt = [], [], []
        steps = ((0, 1, 1.0), (1, 0, 1.0), (1, 1, SQRT2), (1, -1, SQRT2))
        for dr, dc, cost in steps:
            r0, r1 = 0, h - dr
            c0, c1 = max(0, -dc), w - max(0, dc)
            a = idx[r0:r1, c0:c1]
            b = idx[r0 + dr : r1 + dr, c0 + dc : c1 + dc]
            ok = free[r0:r1, c0:c1] & free[r0 + dr : r1 + dr, c0 + dc : c1 + dc]
            a, b = a[ok], b[ok]
            weight = self.cell_size * cost
            src += [a, b]
            dst += [b, a]
            wt += [np.full(a.size, weight), np.full(a.size, weight)]
        src = np.concatenate(src)
        dst = np.concatenate(dst)
        wt = np.concatenate(wt)
        return coo_matrix((wt, (src, dst)), shape=(h * w, h * w)).tocsr()


def _point_in_polygon(px, py, poly):
    """Vectorized closed point-in-polygon test (boundary counts as inside)."""
    poly = np.asarray(poly, dtype=float)
    inside = np.zeros(px.shape, dtype=bool)
    on_edge = np.zeros(px.shape, dtype=bool)
    n = len(poly)
    for k in range(n):
        x1, y1 = poly[k]
        x2, y2 = poly[(k + 1) % n]
        crosses = (y1 > py) != (y2 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (px < xint)
        ex, ey = x2 - x1, y2 - y1
        seg2 = ex * ex + ey * ey
        t = np.clip(((px - x1) * ex + (py - y1) * ey) / seg2, 0.0, 1.0)
        d2 = (px - x1 - t * ex) ** 2 + (py - y1 - t * ey) ** 2
        on_edge |= d2 <= _EPS * _EPS
    return inside | on_edge


def rasterize_obstacles(bounds, cell_size, obstacles):
    """Build a :class:`WorkGrid` covering ``bounds = (xmin, ymin, xmax, ymax)``.

    A cell is an obstacle iff its center lies inside or on the boundary of
    any polygon in ``obstacles``.
    """
    xmin, ymin, xmax, ymax = (float(b) for b in bounds)
    if not cell_size > 0:
        raise ValueError("cell_size must be positive")
    if xmax <= xmin or ymax <= ymin:
        raise ValueError("bounds must have positive extent")
    width = int(math.ceil((xmax - xmin) / cell_size - 1e-9))
    height = int(math.ceil((ymax - ymin) / cell_size - 1e-9))
    xs = xmin + (np.arange(width) + 0.5) * cell_size
    ys = ymin + (np.arange(height) + 0.5) * cell_size
    px, py = np.meshgrid(xs, ys)
    mask = np.zeros((height, width), dtype=bool)
    for poly in obstacles:
        poly = np.asarray(poly, dtype=float)
        if poly.ndim != 2 or poly.shape[1] != 2 or len(poly) < 3:
            raise ValueError("obstacle polygons need at least 3 (x, y) vertices")
        mask |= _point_in_polygon(px, py, poly)
    return WorkGrid((xmin, ymin), float(cell_size), width, height, mask)


def segments_blocked(grid, u0, w0, u1, w1, skip_rows=None, skip_cols=None):
    """Supercover occlusion test for a batch of segments in cell coordinates.

    Returns a boolean array: True where the segment touches (closed squares,
    so corners count) at least one obstacle cell.  If ``skip_rows/skip_cols``
    are given, that one cell per segment is ignored (used to let a ray end on
    an obstacle surface cell).
    """
    u0 = np.atleast_1d(np.asarray(u0, dtype=float))
    w0 = np.atleast_1d(np.asarray(w0, dtype=float))
    u1 = np.atleast_1d(np.asarray(u1, dtype=float))
    w1 = np.atleast_1d(np.asarray(w1, dtype=float))
    n = u0.size
    out = np.zeros(n, dtype=bool)
    if n == 0:
        return out
    # canonical endpoint order keeps the test symmetric in (a, b)
    swap = (u0 > u1) | ((u0 == u1) & (w0 > w1))
    u0, u1 = np.where(swap, u1, u0), np.where(swap, u0, u1)
    w0, w1 = np.where(swap, w1, w0), np.where(swap, w0, w1)
    sr = sc = None
    if skip_rows is not None:
        sr = np.broadcast_to(np.atleast_1d(skip_rows), (n,))
        sc = np.broadcast_to(np.atleast_1d(skip_cols), (n,))

    # bounding boxes without obstacles cannot block
    rows, cols = grid.shape
    c_lo = np.clip(np.ceil(u0 - _EPS).astype(np.int64) - 1, 0, cols)
    c_hi = np.clip(np.floor(u1 + _EPS).astype(np.int64), -1, cols - 1)
    r_lo = np.clip(np.ceil(np.minimum(w0, w1) - _EPS).astype(np.int64) - 1, 0, rows)
    r_hi = np.clip(np.floor(np.maximum(w0, w1) + _EPS).astype(np.int64), -1, rows - 1)
    sat = grid.area_prefix
    box = np.where(
        (c_lo <= c_hi) & (r_lo <= r_hi),
        sat[r_hi + 1, c_hi + 1] - sat[r_lo, c_hi + 1] - sat[r_hi + 1, c_lo] + sat[r_lo, c_lo],
        0,
    )
    if sr is not None:
        inside = (sr >= r_lo) & (sr <= r_hi) & (sc >= c_lo) & (sc <= c_hi)
        inside &= (sr >= 0) & (sr < rows) & (sc >= 0) & (sc < cols)
        obs = np.zeros(n, dtype=bool)
        obs[inside] = grid.obstacles[sr[inside], sc[inside]]
        box = box - obs
    todo = np.flatnonzero(box > 0)
    if todo.size == 0:
        return out
    # group by column span so short segments are not padded to the longest
    span = np.maximum(c_hi[todo] - c_lo[todo] + 1, 1)
    level = np.ceil(np.log2(span)).astype(np.int64)
    for lv in np.unique(level):
        idx = todo[level == lv]
        out[idx] = _supercover_hits(
            grid, u0[idx], w0[idx], u1[idx], w1[idx],
            None if sr is None else sr[idx], None if sc is None else sc[idx],
        )
    return out


def _supercover_hits(grid, u0, w0, u1, w1, skip_rows, skip_cols):
    """Dense per-column supercover test on canonically ordered segments."""
    n = u0.size
    rows, cols = grid.shape
    c_lo = np.maximum(np.ceil(u0 - _EPS).astype(np.int64) - 1, 0)
    c_hi = np.minimum(np.floor(u1 + _EPS).astype(np.int64), cols - 1)
    span = int(max(0, (c_hi - c_lo).max() + 1))
    if span == 0:
        return np.zeros(n, dtype=bool)
    ci = c_lo[:, None] + np.arange(span)[None, :]
    valid = ci <= c_hi[:, None]
    ci = np.minimum(ci, cols - 1)

    du = (u1 - u0)[:, None]
    dw = (w1 - w0)[:, None]
    xa = np.clip(ci.astype(float), u0[:, None], u1[:, None])
    xb = np.clip(ci + 1.0, u0[:, None], u1[:, None])
    flat = du <= _EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(flat, 0.0, dw / np.where(flat, 1.0, du))
    ya = np.where(flat, w0[:, None], w0[:, None] + (xa - u0[:, None]) * slope)
    yb = np.where(flat, w1[:, None], w0[:, None] + (xb - u0[:, None]) * slope)
    ylo = np.minimum(ya, yb) - _EPS
    yhi = np.maximum(ya, yb) + _EPS
    r_lo = np.maximum(np.ceil(ylo).astype(np.int64) - 1, 0)
    r_hi = np.minimum(np.floor(yhi).astype(np.int64), rows - 1)
    valid &= r_lo <= r_hi
    r_lo = np.minimum(r_lo, rows)
    r_hi1 = np.clip(r_hi + 1, 0, rows)
    pre = grid.column_prefix
    counts = pre[ci, r_hi1] - pre[ci, np.minimum(r_lo, r_hi1)]
    if skip_rows is not None:
        sr = np.atleast_1d(skip_rows)[:, None]
        sc = np.atleast_1d(skip_cols)[:, None]
        in_bounds = (sr >= 0) & (sr < rows) & (sc >= 0) & (sc < cols)
        skip_obs = np.zeros_like(in_bounds)
        ok = in_bounds[:, 0]
        skip_obs[ok, 0] = grid.obstacles[sr[ok, 0], sc[ok, 0]]
        hit = skip_obs & (ci == sc) & (r_lo <= sr) & (sr <= r_hi)
        counts = counts - hit.astype(counts.dtype)
    return ((counts > 0) & valid).any(axis=1)


def line_of_sight(grid, a, b):
    """True iff the segment a->b (world coordinates) touches no obstacle cell."""
    if not (grid.contains_point(*a) and grid.contains_point(*b)):
        return False
    ua, wa = grid.to_cell_coords(*a)
    ub, wb = grid.to_cell_coords(*b)
    return not bool(segments_blocked(grid, ua, wa, ub, wb)[0])


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Geodesic distance (m) from every cell to a source region; inf if unreachable."""

    grid: WorkGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values.setflags(write=False)

    def __getitem__(self, cell):
        return float(self.values[cell])

    def min_over(self, cells):
        """Minimum field value over a :class:`CellSet` (inf if empty)."""
        if not cells:
            return math.inf
        return float(self.values[cells.to_mask()].min())


def distance_field(grid, region):
    """8-connected geodesic distance to ``region`` through free cells.

    Straight steps cost ``cell_size``, diagonal steps ``cell_size * sqrt(2)``.
    Raises ``ValueError`` if the region has no free cell.
    """
    src_mask = region.to_mask() & ~grid.obstacles
    sources = np.flatnonzero(src_mask.ravel())
    if sources.size == 0:
        raise ValueError("distance field source region is empty after removing obstacles")
    dist = dijkstra(grid._free_graph, directed=True, indices=sources, min_only=True)
    dist = np.asarray(dist, dtype=float).reshape(grid.shape)
    dist[grid.obstacles] = math.inf
    return DistanceField(grid, dist)
