"""Planar holonomic robot on an (x, y, theta) lattice.

Footprints, swept volumes and sensor views are rasterized onto a
:class:`~vamp.geometry.WorkGrid`.  All rasters are computed in coordinates
local to an integer anchor cell, so a template computed once per heading can
be shifted to any lattice position and reproduce the direct computation bit
for bit.  :class:`LatticeGraph` relies on that to cache per-heading templates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .geometry import CellSet, mask_to_bits, segments_blocked

TWO_PI = 2.0 * math.pi
_EPS = 1e-9


class Configuration(NamedTuple):
    ix: int
    iy: int
    itheta: int


@dataclass(frozen=True)
class Lattice:
    """Translation step (m) and number of discrete headings."""

    step: float = 0.125
    n_theta: int = 16

    def __post_init__(self):
        if not self.step > 0 or self.n_theta < 1:
            raise ValueError("invalid lattice parameters")

    @property
    def dtheta(self):
        return TWO_PI / self.n_theta

    def pose(self, q):
        return (q.ix * self.step, q.iy * self.step, (q.itheta % self.n_theta) * self.dtheta)

    def moves(self):
        return (
            (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)
        )

    def normalize(self, q):
        return Configuration(q.ix, q.iy, q.itheta % self.n_theta)

    def nearest(self, x, y, theta):
        it = int(round(theta / self.dtheta)) % self.n_theta
        return Configuration(int(round(x / self.step)), int(round(y / self.step)), it)


DEFAULT_LATTICE = Lattice()


@dataclass(frozen=True)
class Sector:
    """One view cone: heading offset and angular width (rad), range band (m)."""

    offset: float = 0.0
    width: float = math.radians(200.0)
    min_range: float = 0.0
    max_range: float = 2.5

    def __post_init__(self):
        if not (0.0 < self.width <= TWO_PI + _EPS):
            raise ValueError("sector angular width must be in (0, 2*pi]")
        if not (0.0 <= self.min_range < self.max_range):
            raise ValueError("sector needs 0 <= min_range < max_range")


@dataclass(frozen=True)
class SensorSpec:
    sectors: tuple = (Sector(),)
    mount: tuple = (0.0, 0.0)

    def __post_init__(self):
        if len(self.sectors) < 1:
            raise ValueError("sensor needs at least one sector")
        object.__setattr__(self, "sectors", tuple(self.sectors))
        object.__setattr__(self, "mount", tuple(float(m) for m in self.mount))

    @classmethod
    def cone(cls, fov_deg, max_range=2.5, min_range=0.0, mount=(0.0, 0.0)):
        """Single forward-facing sector of ``fov_deg`` degrees."""
        if not (0.0 < fov_deg <= 360.0):
            raise ValueError("field of view must be in (0, 360] degrees")
        return cls((Sector(0.0, math.radians(fov_deg), min_range, max_range),), mount)

    @property
    def max_range(self):
        return max(s.max_range for s in self.sectors)


@dataclass(frozen=True)
class RobotSpec:
    """Rectangular footprint given by half extents (m) in the robot frame."""

    half_extents: tuple = (0.5, 0.5)
    boundary_samples: int = 32
    interp_step: float = 0.0625

    def __post_init__(self):
        object.__setattr__(self, "half_extents", tuple(float(h) for h in self.half_extents))
        if min(self.half_extents) <= 0:
            raise ValueError("footprint half extents must be positive")
        if self.boundary_samples < 8:
            raise ValueError("boundary_samples must be >= 8")
        if not self.interp_step > 0:
            raise ValueError("interp_step must be positive")

    @property
    def circumradius(self):
        return math.hypot(*self.half_extents)

    def boundary_points(self):
        """Evenly spaced samples along the footprint perimeter (robot frame)."""
        hx, hy = self.half_extents
        corners = np.array([[hx, hy], [-hx, hy], [-hx, -hy], [hx, -hy], [hx, hy]])
        seg = np.hypot(*np.diff(corners, axis=0).T)
        s = np.linspace(0.0, seg.sum(), self.boundary_samples, endpoint=False)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        k = np.searchsorted(cum, s, side="right") - 1
        t = (s - cum[k]) / seg[k]
        return corners[k] + t[:, None] * (corners[k + 1] - corners[k])


class OutOfBoundsError(ValueError):
    pass


def config_distance(q1, q2, lattice=DEFAULT_LATTICE, rho=math.hypot(0.5, 0.5)):
    """Step length in configuration space: sqrt(dx^2 + dy^2 + (rho*dtheta)^2)."""
    dx = (q2.ix - q1.ix) * lattice.step
    dy = (q2.iy - q1.iy) * lattice.step
    dt = _wrap(((q2.itheta - q1.itheta) % lattice.n_theta) * lattice.dtheta)
    return math.sqrt(dx * dx + dy * dy + (rho * dt) ** 2)


def translation_length(q1, q2, lattice=DEFAULT_LATTICE):
    return math.hypot((q2.ix - q1.ix) * lattice.step, (q2.iy - q1.iy) * lattice.step)


def _wrap(a):
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a + math.pi, TWO_PI)
    if a <= 0:
        a += TWO_PI
    return a - math.pi


# -- anchored raster helpers ---------------------------------------------------

def _anchor(grid, lattice, q):
    """Integer anchor cell and sub-cell phase of a lattice configuration.

    Returns ``(col, row, frac_u, frac_w)`` with the pose located at
    ``(col + frac_u, row + frac_w)`` in cell units.
    """
    k = lattice.step / grid.cell_size
    ki = int(round(k))
    if abs(k - ki) > 1e-9 or ki < 1:
        raise ValueError("lattice step must be an integer multiple of the cell size")
    bu = -grid.origin[0] / grid.cell_size
    bw = -grid.origin[1] / grid.cell_size
    fu, fw = math.floor(bu + _EPS), math.floor(bw + _EPS)
    frac_u = max(bu - fu, 0.0)
    frac_w = max(bw - fw, 0.0)
    return q.ix * ki + fu, q.iy * ki + fw, frac_u, frac_w


def _dilate(mask):
    padded = np.zeros((mask.shape[0] + 2, mask.shape[1] + 2), dtype=bool)
    padded[1:-1, 1:-1] = mask
    out = np.zeros_like(padded)
    h, w = mask.shape
    for dr in (0, 1, 2):
        for dc in (0, 1, 2):
            out[dr : dr + h, dc : dc + w] |= mask
    return out


def _core_window(robot, cell_size, poses, frac_u, frac_w):
    """Union of centers-inside rasters for local poses ``(du, dw, theta)``.

    ``du, dw`` are pose offsets (cells) from the anchor; returns
    ``(window, r0, c0)`` where window[0, 0] is local cell (r0, c0).
    """
    hx, hy = robot.half_extents
    rad = robot.circumradius / cell_size + 2.0
    pu = np.array([p[0] for p in poses]) + frac_u
    pw = np.array([p[1] for p in poses]) + frac_w
    c0 = int(math.floor(pu.min() - rad))
    c1 = int(math.ceil(pu.max() + rad))
    r0 = int(math.floor(pw.min() - rad))
    r1 = int(math.ceil(pw.max() + rad))
    lc = np.arange(c0, c1 + 1) + 0.5
    lr = np.arange(r0, r1 + 1) + 0.5
    cu, cw = np.meshgrid(lc, lr)
    win = np.zeros(cu.shape, dtype=bool)
    ex, ey = hx / cell_size + _EPS, hy / cell_size + _EPS
    for (du, dw, th), u, w in zip(poses, pu, pw):
        ct, st = math.cos(th), math.sin(th)
        dx = cu - u
        dy = cw - w
        lx = ct * dx + st * dy
        ly = -st * dx + ct * dy
        win |= (np.abs(lx) <= ex) & (np.abs(ly) <= ey)
    return win, r0, c0


def footprint_window(robot, cell_size, theta, frac_u, frac_w):
    win, r0, c0 = _core_window(robot, cell_size, [(0.0, 0.0, theta)], frac_u, frac_w)
    return _dilate(win), r0 - 1, c0 - 1


def _interp_poses(robot, cell_size, d_u, d_w, th1, dth):
    """Linearly interpolated local poses so no boundary sample moves more than interp_step."""
    rmax = float(np.hypot(*robot.boundary_points().T).max())
    travel = math.hypot(d_u, d_w) * cell_size + rmax * abs(dth)
    n = max(1, int(math.ceil(travel / robot.interp_step - 1e-12)))
    return [(d_u * i / n, d_w * i / n, th1 + dth * i / n) for i in range(n + 1)]


def sweep_window(robot, cell_size, d_u, d_w, th1, dth, frac_u, frac_w):
    poses = _interp_poses(robot, cell_size, d_u, d_w, th1, dth)
    win, r0, c0 = _core_window(robot, cell_size, poses, frac_u, frac_w)
    return _dilate(win), r0 - 1, c0 - 1


def _place(grid, window, row0, col0, strict=True):
    """Embed a local window at absolute (row0, col0) and return a CellSet."""
    h, w = window.shape
    rows, cols = grid.shape
    if strict:
        nz_r, nz_c = np.nonzero(window)
        if nz_r.size and (
            row0 + nz_r.min() < 0 or col0 + nz_c.min() < 0
            or row0 + nz_r.max() >= rows or col0 + nz_c.max() >= cols
        ):
            raise OutOfBoundsError("robot raster leaves the workspace grid")
    full = np.zeros(grid.shape, dtype=bool)
    gr0, gc0 = max(row0, 0), max(col0, 0)
    gr1, gc1 = min(row0 + h, rows), min(col0 + w, cols)
    if gr0 < gr1 and gc0 < gc1:
        full[gr0:gr1, gc0:gc1] = window[gr0 - row0 : gr1 - row0, gc0 - col0 : gc1 - col0]
    return CellSet.from_mask(full)


def _check_interp(robot, grid):
    if robot.interp_step > grid.cell_size + _EPS:
        raise ValueError("robot interp_step must not exceed the grid cell size")


def footprint_cells(robot, grid, q, lattice=DEFAULT_LATTICE):
    """Cells covered by the robot at ``q``: centers inside the footprint, dilated one cell."""
    col, row, fu, fw = _anchor(grid, lattice, q)
    _, _, th = lattice.pose(q)
    win, r0, c0 = footprint_window(robot, grid.cell_size, th, fu, fw)
    return _place(grid, win, row + r0, col + c0)


def _edge_params(lattice, grid, q1, q2):
    k = int(round(lattice.step / grid.cell_size))
    d_u = (q2.ix - q1.ix) * k
    d_w = (q2.iy - q1.iy) * k
    th1 = (q1.itheta % lattice.n_theta) * lattice.dtheta
    dth = _wrap(((q2.itheta - q1.itheta) % lattice.n_theta) * lattice.dtheta)
    return d_u, d_w, th1, dth


def swept_cells(robot, grid, q1, q2, lattice=DEFAULT_LATTICE):
    """Cells swept moving q1 -> q2 by linear interpolation in (x, y, theta).

    Computed from the lexicographically smaller endpoint so the result is
    exactly symmetric.
    """
    _check_interp(robot, grid)
    q1, q2 = lattice.normalize(q1), lattice.normalize(q2)
    if q2 < q1:
        q1, q2 = q2, q1
    col, row, fu, fw = _anchor(grid, lattice, q1)
    d_u, d_w, th1, dth = _edge_params(lattice, grid, q1, q2)
    win, r0, c0 = sweep_window(robot, grid.cell_size, d_u, d_w, th1, dth, fu, fw)
    return _place(grid, win, row + r0, col + c0)


# -- visibility ---------------------------------------------------------------

def _mount_cell_coords(sensor, grid, lattice, q):
    col, row, fu, fw = _anchor(grid, lattice, q)
    _, _, th = lattice.pose(q)
    mx, my = sensor.mount
    ct, st = math.cos(th), math.sin(th)
    ou = (ct * mx - st * my) / grid.cell_size
    ow = (st * mx + ct * my) / grid.cell_size
    return col, row, fu + ou, fw + ow, th


def _range_window(sensor, cell_size, mu, mw):
    """Local candidate window around a mount at local (mu, mw) cells from the anchor."""
    rad = int(math.ceil(sensor.max_range / cell_size)) + 1
    c0 = int(math.floor(mu)) - rad
    r0 = int(math.floor(mw)) - rad
    n = 2 * rad + 2
    du = (np.arange(c0, c0 + n) + 0.5 - mu)[None, :]
    dw = (np.arange(r0, r0 + n) + 0.5 - mw)[:, None]
    return du, dw, r0, c0


def sector_window(sensor, cell_size, theta, mu, mw):
    """Boolean window of cell centers inside any sector (ignores occlusion)."""
    du, dw, r0, c0 = _range_window(sensor, cell_size, mu, mw)
    dist = np.hypot(du, dw) * cell_size
    ang = np.arctan2(dw, du)
    win = np.zeros(dist.shape, dtype=bool)
    for s in sensor.sectors:
        in_range = (dist >= s.min_range - _EPS) & (dist <= s.max_range + _EPS)
        if s.width >= TWO_PI - _EPS:
            win |= in_range
            continue
        rel = np.mod(ang - (theta + s.offset) + math.pi, TWO_PI) - math.pi
        win |= in_range & (np.abs(rel) <= s.width / 2.0 + 1e-12)
    return win, r0, c0


def unoccluded(grid, mount_u, mount_w, rows, cols):
    """For absolute cells (rows, cols) in-grid, True where the center is in sight of the mount."""
    rows = np.asarray(rows)
    cols = np.asarray(cols)
    if rows.size == 0:
        return np.zeros(0, dtype=bool)
    blocked = segments_blocked(
        grid,
        np.full(rows.size, mount_u),
        np.full(rows.size, mount_w),
        cols + 0.5,
        rows + 0.5,
        skip_rows=rows,
        skip_cols=cols,
    )
    return ~blocked


def _clip_window(grid, win, r0, c0):
    rows, cols = grid.shape
    rr, cc = np.nonzero(win)
    rr = rr + r0
    cc = cc + c0
    keep = (rr >= 0) & (rr < rows) & (cc >= 0) & (cc < cols)
    return rr[keep], cc[keep]


def visible_cells(sensor, grid, q, lattice=DEFAULT_LATTICE):
    """Cells whose centers are inside a sensor sector and in line of sight of the mount."""
    col, row, mu, mw, th = _mount_cell_coords(sensor, grid, lattice, q)
    win, r0, c0 = sector_window(sensor, grid.cell_size, th, mu, mw)
    rr, cc = _clip_window(grid, win, row + r0, col + c0)
    ok = unoccluded(grid, col + mu, row + mw, rr, cc)
    full = np.zeros(grid.shape, dtype=bool)
    full[rr[ok], cc[ok]] = True
    return CellSet.from_mask(full)


# -- lattice graph -------------------------------------------------------------

class LatticeGraph:
    """Configurations with collision-free footprints and their optimistic edges.

    Neighbor lists, views and template rasters are computed lazily and cached;
    every cache is a pure function of the constructor inputs, so results are
    deterministic.  Hot paths work with raw integer bitsets (``*_bits``).
    """

    def __init__(self, grid, robot, sensor, lattice=DEFAULT_LATTICE):
        _check_interp(robot, grid)
        self.grid = grid
        self.robot = robot
        self.sensor = sensor
        self.lattice = lattice
        self.rho = robot.circumradius
        self.k = int(round(lattice.step / grid.cell_size))
        # anchor of q is (ix * k + col0, iy * k + row0); also validates step / cell ratio
        self._col0, self._row0, _, _ = _anchor(grid, lattice, Configuration(0, 0, 0))
        self._obs = grid.obstacle_mask.bits
        self._stride = grid.width
        self._shape = grid.shape
        self._fp_tmpl = {}
        self._sw_tmpl = {}
        self._neighbors = {}
        self._moves = {}
        self._views = {}
        self._occl = {}
        self._sector = {}
        self.configurations = self._enumerate()

    # templates
    def _template(self, window, r0, c0):
        h, w = window.shape
        cols = self._stride
        if w > cols:
            return None
        wide = np.zeros((h, cols), dtype=bool)
        wide[:, :w] = window
        bits = mask_to_bits(wide)
        nz_r, nz_c = np.nonzero(window)
        box = (nz_r.min(), nz_r.max(), nz_c.min(), nz_c.max())
        return bits, r0, c0, box

    def _placed(self, tmpl, row, col):
        bits, r0, c0, (br0, br1, bc0, bc1) = tmpl
        R, C = row + r0, col + c0
        rows, cols = self._shape
        if R + br0 < 0 or C + bc0 < 0 or R + br1 >= rows or C + bc1 >= cols:
            return None
        shift = R * cols + C
        return bits << shift if shift >= 0 else bits >> -shift

    def _footprint_template(self, itheta):
        t = self._fp_tmpl.get(itheta)
        if t is None:
            _, _, fu, fw = _anchor(self.grid, self.lattice, Configuration(0, 0, itheta))
            th = itheta * self.lattice.dtheta
            t = self._template(*footprint_window(self.robot, self.grid.cell_size, th, fu, fw))
            self._fp_tmpl[itheta] = t
        return t

    def footprint_bits(self, q):
        k = self.k
        return self._placed(self._footprint_template(q.itheta), q.iy * k + self._row0, q.ix * k + self._col0)

    def sweep_bits(self, q1, q2):
        """Swept-cell bitset for the move q1 -> q2, or None if it leaves the grid."""
        if q2 < q1:
            q1, q2 = q2, q1
        key = (q2.ix - q1.ix, q2.iy - q1.iy, q1.itheta, q2.itheta)
        t = self._sw_tmpl.get(key)
        if t is None:
            d_u, d_w, th1, dth = _edge_params(self.lattice, self.grid, q1, q2)
            _, _, fu, fw = _anchor(self.grid, self.lattice, q1)
            win = sweep_window(self.robot, self.grid.cell_size, d_u, d_w, th1, dth, fu, fw)
            t = self._template(*win)
            self._sw_tmpl[key] = t
        k = self.k
        return self._placed(t, q1.iy * k + self._row0, q1.ix * k + self._col0)

    def sweep(self, q1, q2):
        return CellSet(self.sweep_bits(q1, q2), self.grid.shape)

    def _enumerate(self):
        rows, cols = self.grid.shape
        k = self.k
        configs = []
        for it in range(self.lattice.n_theta):
            bits, r0, c0, (br0, br1, bc0, bc1) = self._footprint_template(it)
            col0, row0, _, _ = _anchor(self.grid, self.lattice, Configuration(0, 0, it))
            ix_lo = math.ceil((-(col0 + c0 + bc0)) / k)
            ix_hi = math.floor((cols - 1 - (col0 + c0 + bc1)) / k)
            iy_lo = math.ceil((-(row0 + r0 + br0)) / k)
            iy_hi = math.floor((rows - 1 - (row0 + r0 + br1)) / k)
            for iy in range(iy_lo, iy_hi + 1):
                for ix in range(ix_lo, ix_hi + 1):
                    q = Configuration(ix, iy, it)
                    fp = self.footprint_bits(q)
                    if fp is not None and not fp & self._obs:
                        configs.append(q)
        configs.sort()
        return frozenset(configs)

    def __contains__(self, q):
        return q in self.configurations

    def __len__(self):
        return len(self.configurations)

    def distance(self, q1, q2):
        return config_distance(q1, q2, self.lattice, self.rho)

    def neighbors(self, q):
        """``(q2, cost)`` pairs for optimistically free lattice moves from ``q``."""
        nb = self._neighbors.get(q)
        if nb is None:
            nb = tuple((q2, c) for q2, c, _ in self.moves_from(q))
            self._neighbors[q] = nb
        return nb

    def moves_from(self, q):
        """``(q2, cost, sweep_bits)`` triples for the free moves from ``q`` (cached)."""
        mv = self._moves.get(q)
        if mv is not None:
            return mv
        mv = []
        n = self.lattice.n_theta
        for dx, dy, dt in self.lattice.moves():
            q2 = Configuration(q.ix + dx, q.iy + dy, (q.itheta + dt) % n)
            if q2 == q or q2 not in self.configurations:
                continue
            s = None
            back = self._moves.get(q2)
            if back is not None:
                s = next((b for q3, _, b in back if q3 == q), None)
                if s is None:
                    continue
            else:
                s = self.sweep_bits(q, q2)
                if s is None or s & self._obs:
                    continue
            mv.append((q2, self.distance(q, q2), s))
        mv = tuple(mv)
        self._moves[q] = mv
        return mv

    def edges(self):
        """All unordered edges as sorted ``(q1, q2)`` pairs."""
        out = set()
        for q in sorted(self.configurations):
            for q2, _ in self.neighbors(q):
                out.add((q, q2) if q < q2 else (q2, q))
        return sorted(out)

    def _occlusion(self, q):
        col, row, mu, mw, _ = _mount_cell_coords(self.sensor, self.grid, self.lattice, q)
        key = (col, row, round(mu, 9), round(mw, 9))
        occ = self._occl.get(key)
        if occ is None:
            du, dw, r0, c0 = _range_window(self.sensor, self.grid.cell_size, mu, mw)
            win = (np.hypot(du, dw) * self.grid.cell_size) <= self.sensor.max_range + _EPS
            rr, cc = _clip_window(self.grid, win, row + r0, col + c0)
            sub = self.grid.obstacles[
                max(row + r0, 0) : row + r0 + win.shape[0], max(col + c0, 0) : col + c0 + win.shape[1]
            ]
            if sub.any():
                ok = unoccluded(self.grid, col + mu, row + mw, rr, cc)
            else:
                ok = np.ones(rr.size, dtype=bool)
            vis = np.zeros(win.shape, dtype=bool)
            vis[rr[ok] - (row + r0), cc[ok] - (col + c0)] = True
            occ = (vis, row + r0, col + c0)
            self._occl[key] = occ
        return occ, mu, mw

    def view_bits(self, q):
        v = self._views.get(q)
        if v is not None:
            return v
        (vis, R, C), mu, mw = self._occlusion(q)
        th = (q.itheta % self.lattice.n_theta) * self.lattice.dtheta
        skey = (q.itheta, round(mu, 9), round(mw, 9))
        sec = self._sector.get(skey)
        if sec is None:
            sec = sector_window(self.sensor, self.grid.cell_size, th, mu, mw)[0]
            self._sector[skey] = sec
        v = _place(self.grid, vis & sec, R, C, strict=False).bits
        self._views[q] = v
        return v

    def view(self, q):
        return CellSet(self.view_bits(q), self.grid.shape)

    def footprint(self, q):
        return CellSet(self.footprint_bits(q), self.grid.shape)


def build_graph(scene):
    """Lattice graph for a scene; raises ``ValueError`` if the start is in collision."""
    graph = LatticeGraph(scene.grid, scene.robot, scene.sensor, scene.lattice)
    if scene.q0 not in graph:
        raise ValueError(f"start configuration {tuple(scene.q0)} is in collision or out of bounds")
    return graph
