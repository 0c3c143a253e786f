"""Path validation, imaging-pose minimization and summary metrics.

The validator rasterizes footprints, sweeps and views directly from the robot
and sensor models rather than reusing the planners' cached graph, so it is an
independent check on planner output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .geometry import CellSet
from .robot import Configuration, OutOfBoundsError, footprint_cells, swept_cells, visible_cells


@dataclass
class ValidationReport:
    """Outcome of replaying a path.

    ``viewed_timeline[i]`` is the viewed region after arriving at ``path[i]``.
    ``violation_cells`` collects every swept cell that had not been viewed
    (plus obstacle hits and malformed steps); ``first_violating_edge_index``
    is the index ``i`` of the first bad edge ``path[i] -> path[i+1]``.
    """

    feasible: bool
    first_violating_edge_index: Optional[int]
    violation_cells: CellSet
    viewed_timeline: list = field(repr=False)

    def to_dict(self):
        return {
            "feasible": self.feasible,
            "first_violating_edge_index": self.first_violating_edge_index,
            "violation_cell_count": len(self.violation_cells),
        }


@dataclass
class AnnotatedPath:
    """A path with the subset of configurations where an image is taken."""

    path: list
    take_image: list

    @property
    def n_images(self):
        return sum(bool(t) for t in self.take_image)


class _Rasters:
    """Per-call memo of footprints, sweeps and views."""

    def __init__(self, scene):
        self.scene = scene
        self.grid = scene.grid
        self._views = {}
        self._sweeps = {}

    def view(self, q):
        v = self._views.get(q)
        if v is None:
            s = self.scene
            v = visible_cells(s.sensor, self.grid, q, s.lattice)
            self._views[q] = v
        return v

    def sweep(self, a, b):
        key = (a, b) if a <= b else (b, a)
        s = self._sweeps.get(key)
        if s is None:
            sc = self.scene
            try:
                s = swept_cells(sc.robot, self.grid, a, b, sc.lattice)
            except OutOfBoundsError:
                s = None
            self._sweeps[key] = s
        return s

    def is_lattice_step(self, a, b):
        n = self.scene.lattice.n_theta
        dx, dy = b.ix - a.ix, b.iy - a.iy
        dt = (b.itheta - a.itheta) % n
        dt = min(dt, n - dt)
        return abs(dx) + abs(dy) + dt == 1

    def start_ok(self, q):
        sc = self.scene
        try:
            fp = footprint_cells(sc.robot, self.grid, q, sc.lattice)
        except OutOfBoundsError:
            return False, CellSet.empty(self.grid.shape)
        hit = fp & self.grid.obstacle_mask
        return not hit, hit


def _as_cells(scene, v0):
    if v0 is None:
        return scene.initial_view()
    if isinstance(v0, CellSet):
        return v0
    return CellSet(int(v0), scene.grid.shape)


def validate_path(scene, path, v0=None, take_image=None):
    """Replay ``path`` from the viewed region ``v0`` (default: the scene's).

    Each step must be a single lattice move whose swept cells are obstacle
    free and already viewed.  With ``take_image`` only flagged
    configurations contribute views.
    """
    r = _Rasters(scene)
    path = [Configuration(*q) for q in path]
    shape = scene.grid.shape
    empty = CellSet.empty(shape)
    v = _as_cells(scene, v0)
    bad = empty
    first = None
    if not path:
        return ValidationReport(False, None, empty, [])
    if take_image is not None and len(take_image) != len(path):
        raise ValueError("take_image must have one flag per configuration")

    def shoot(i):
        return take_image is None or bool(take_image[i])

    ok, hit = r.start_ok(path[0])
    if not ok:
        first = -1
        bad = hit if hit else CellSet.full(shape)
    if shoot(0):
        v = v | r.view(path[0])
    timeline = [v]
    for i, (a, b) in enumerate(zip(path, path[1:])):
        s = r.sweep(a, b) if r.is_lattice_step(a, b) else None
        if s is None:
            # not a lattice move, or leaves the grid: no sweep to check, so flag every unviewed cell
            wrong = CellSet.full(shape) - v
            if not wrong:
                wrong = CellSet.full(shape)
        else:
            wrong = (s - v) | (s & scene.grid.obstacle_mask)
        if wrong:
            bad = bad | wrong
            if first is None:
                first = i
        if shoot(i + 1):
            v = v | r.view(b)
        timeline.append(v)
    feasible = first is None
    return ValidationReport(feasible, first, bad, timeline)


def minimize_views(scene, path, v0=None):
    """Choose a small set of imaging poses that keeps ``path`` feasible.

    Greedy and prefix-constrained: walking the path, any unviewed swept cells
    of edge ``i`` are covered by views at indices ``<= i``, picking the pose
    covering the most missing cells and breaking ties by earliest index.
    ``v0`` is always available for free.
    """
    rep = validate_path(scene, path, v0)
    if not rep.feasible:
        raise ValueError(
            f"path is infeasible at edge {rep.first_violating_edge_index}; nothing to minimize"
        )
    r = _Rasters(scene)
    path = [Configuration(*q) for q in path]
    covered = _as_cells(scene, v0).bits
    views = [r.view(q).bits for q in path]
    flags = [False] * len(path)
    for i, (a, b) in enumerate(zip(path, path[1:])):
        need = r.sweep(a, b).bits & ~covered
        while need:
            best, gain = -1, 0
            for j in range(i + 1):
                if flags[j]:
                    continue
                g = (views[j] & need).bit_count()
                if g > gain:
                    best, gain = j, g
            if best < 0:
                raise AssertionError("feasible path left an edge uncovered")
            flags[best] = True
            covered |= views[best]
            need &= ~views[best]
    return AnnotatedPath(path, flags)


def path_metrics(result):
    """``(length_m, expanded_nodes, wall_time_s)`` for a planner result."""
    return result.length_m, result.stats.expanded, result.stats.wall_time
