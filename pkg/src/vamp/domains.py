"""Built-in benchmark scenes.

Every layout is described by its free space: a union of axis-aligned
rectangles (meters) inside the scene bounds.  Walls are everything else.
Single-lane hallways are ``LANE`` wide, which fits the 1 m robot plus its
one-cell raster margin at a single lateral offset and blocks any rotation.  Poses are ``(x, y, theta_deg)``.

All three scenes start the robot with a look-around: v0 is the start view
plus every free cell within ``LOOKAROUND_RADIUS`` of the start in sight of
the sensor mount.  Without it a narrow-cone robot could not move at all.

hallway_easy
    An L-shaped corridor 2 m wide.  The robot drives 5 m along the bottom
    leg and turns the corner into the 3.4 m vertical leg.

hallway_hard
    A 5.5 x 5 m room with a 4.5 m dead-end hallway leaving its right wall.
    The goal sits at the far end facing out, so the hallway has to be
    entered camera-first, left again, and entered backwards.

two_hallway
    A 9 x 3 m start room with two single-lane hallways above it.  The left
    hallway runs up and turns right along the top of the scene, ending at a
    0.5 m slot.  The keyed hallway starts at a side corridor off the right of
    the room, doubles back left and climbs to a far end just past that slot,
    so the far end is in sight of the slot and of nothing else outside the
    keyed hallway.  The goal is at the far end facing out; the robot cannot
    rotate in the keyed hallway, so it scouts camera-first, backs out, turns
    and backs in.

sideways_slide
    A wide, shallow robot must slide sideways along a thin corridor that it
    can only occupy facing across it; see :func:`sideways_slide`.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .geometry import CellSet
from .robot import DEFAULT_LATTICE, Configuration, Lattice, LatticeGraph, RobotSpec, SensorSpec, visible_cells
from .scene import GoalSpec, Scene

LANE = 1.1875
LOOKAROUND_RADIUS = 1.5
DEFAULT_FOV_DEG = {"hallway_easy": 200.0, "hallway_hard": 50.0, "two_hallway": 200.0}

def hlane(yc, x0, x1):
    """Free rectangle of a horizontal single lane whose robots sit at ``y = yc``."""
    return (x0, yc - 0.5625, x1, yc + 0.625)


def vlane(xc, y0, y1):
    """Free rectangle of a vertical single lane whose robots sit at ``x = xc``."""
    return (xc - 0.5625, y0, xc + 0.625, y1)


HALLWAY_EASY = {
    "bounds": (0.0, 0.0, 8.0, 6.0),
    "free": [(0.0, 0.0, 7.0, 2.0), (5.0, 0.0, 7.0, 6.0)],
    "start": (1.0, 1.0, 0.0),
    "goal": (6.0, 4.375, 90.0),
}

HALLWAY_HARD = {
    "bounds": (0.0, 0.0, 10.0, 5.0),
    "free": [(0.0, 0.0, 5.5, 5.0), hlane(2.5, 5.5, 10.0)],
    "start": (1.5, 2.5, 0.0),
    "goal": (9.375, 2.5, 180.0),
}

TWO_HALLWAY = {
    "bounds": (0.0, 0.0, 9.0, 10.0),
    "free": [
        (0.0, 0.0, 9.0, 3.0),
        vlane(1.5, 3.0, 9.5),
        hlane(8.875, 0.9375, 6.0),
        (6.0, 8.625, 6.5625, 9.125),  # the slot
        vlane(7.125, 3.9375, 9.5),
        hlane(4.5, 6.5625, 9.0),
        vlane(8.375, 3.0, 5.125),
    ],
    "start": (1.0, 1.5, 0.0),
    "goal": (7.125, 8.875, 270.0),
}


def free_space_obstacles(bounds, free):
    """Wall rectangles covering ``bounds`` minus the union of ``free`` rectangles.

    The complement is cut along every rectangle edge and merged into
    row-wise maximal strips, so the output is deterministic.
    """
    x0, y0, x1, y1 = bounds
    xs = sorted({x0, x1, *[v for r in free for v in (r[0], r[2]) if x0 <= v <= x1]})
    ys = sorted({y0, y1, *[v for r in free for v in (r[1], r[3]) if y0 <= v <= y1]})
    open_ = np.zeros((len(ys) - 1, len(xs) - 1), dtype=bool)
    for fx0, fy0, fx1, fy1 in free:
        for j in range(len(ys) - 1):
            for i in range(len(xs) - 1):
                if fx0 <= xs[i] and xs[i + 1] <= fx1 and fy0 <= ys[j] and ys[j + 1] <= fy1:
                    open_[j, i] = True
    walls = []
    for j in range(len(ys) - 1):
        i = 0
        while i < len(xs) - 1:
            if open_[j, i]:
                i += 1
                continue
            k = i
            while k < len(xs) - 1 and not open_[j, k]:
                k += 1
            a, b = xs[i], xs[k]
            walls.append(((a, ys[j]), (b, ys[j]), (b, ys[j + 1]), (a, ys[j + 1])))
            i = k
    return walls


def _config(pose, lattice=DEFAULT_LATTICE):
    x, y, th = pose
    ix, iy = round(x / lattice.step), round(y / lattice.step)
    it = round(th / (360.0 / lattice.n_theta)) % lattice.n_theta
    if abs(ix * lattice.step - x) > 1e-9 or abs(iy * lattice.step - y) > 1e-9:
        raise ValueError(f"pose {pose} is not on the lattice")
    return Configuration(ix, iy, it)


def with_lookaround(scene, radius=LOOKAROUND_RADIUS):
    """Make v0 explicit: default view plus a 360 degree look within ``radius``."""
    grid = scene.grid
    around = visible_cells(SensorSpec.cone(360.0, radius, 0.0, scene.sensor.mount), grid, scene.q0, scene.lattice)
    v = scene.initial_view() | around
    cells = tuple((int(r), int(c)) for r, c in np.argwhere(v.to_mask()))
    return replace(scene, v0_mode="explicit", v0_cells=cells)


def _build(name, spec, fov_deg):
    scene = Scene(
        bounds=spec["bounds"],
        obstacles=free_space_obstacles(spec["bounds"], spec["free"]),
        q0=_config(spec["start"]),
        goal=GoalSpec(target=_config(spec["goal"])),
        sensor=SensorSpec.cone(fov_deg),
        name=name,
    )
    return with_lookaround(scene)


def make_domain(name, fov_deg=None):
    """One of ``hallway_easy``, ``hallway_hard``, ``two_hallway``, ``sideways_slide``."""
    builders = {
        "hallway_easy": HALLWAY_EASY,
        "hallway_hard": HALLWAY_HARD,
        "two_hallway": TWO_HALLWAY,
    }
    if name == "sideways_slide":
        return sideways_slide(fov_deg)
    if name not in builders:
        raise ValueError(f"unknown domain {name!r}; expected one of {sorted(builders) + ['sideways_slide']}")
    fov = DEFAULT_FOV_DEG[name] if fov_deg is None else float(fov_deg)
    return _build(name, builders[name], fov)


SLIDE_LATTICE = Lattice(step=0.25, n_theta=8)
SLIDE_ROBOT = RobotSpec(half_extents=(0.35, 0.5))


def sideways_slide(fov_deg=None, gap=(4.5, 5.5)):
    """A goal straight to the side of the start along a thin, mostly mapped corridor.

    The robot is 1 m wide and 0.7 m deep, so it fits the corridor only facing
    up or down and can never look along it.  v0 holds the start view and the
    whole corridor except the ``gap`` interval of x, which lies beyond sensor
    range from either end and so can never be seen.  The relaxed plan slides
    through the gap, no view of the gap exists, and the planner has to explore
    until the detour through the room above (up the left lane, across, back
    down the right lane) becomes the cheaper relaxed plan.
    """
    fov = 90.0 if fov_deg is None else float(fov_deg)
    lat = SLIDE_LATTICE
    bounds = (0.0, 0.0, 10.0, 5.5)
    corridor = (0.4375, 0.5625, 9.625, 1.5)
    free = [corridor, (0.4375, 1.0, 1.625, 3.0), (8.4375, 1.0, 9.625, 3.0), (0.0, 3.0, 10.0, 5.5)]
    scene = Scene(
        bounds=bounds,
        obstacles=free_space_obstacles(bounds, free),
        q0=_config((1.0, 1.0, 90.0), lat),
        goal=GoalSpec(target=_config((9.0, 1.0, 90.0), lat), n_theta=lat.n_theta),
        robot=SLIDE_ROBOT,
        sensor=SensorSpec.cone(fov),
        lattice=lat,
        name="sideways_slide",
    )
    grid = scene.grid
    cs = grid.cell_size
    mapped = np.zeros(grid.shape, dtype=bool)
    mapped[: round(corridor[3] / cs), :] = True
    mapped[:, round(gap[0] / cs): round(gap[1] / cs)] = False
    v = scene.initial_view() | CellSet.from_mask(mapped & ~grid.obstacles)
    cells = tuple((int(r), int(c)) for r, c in np.argwhere(v.to_mask()))
    return replace(scene, v0_mode="explicit", v0_cells=cells)


RANDOM_LATTICE = Lattice(step=0.25, n_theta=8)
RANDOM_FOVS = (60.0, 90.0, 120.0, 200.0, 360.0)


def _rect(x0, y0, x1, y1):
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))


def random_scene(seed, max_size=4.0, max_obstacles=4, lattice=RANDOM_LATTICE, min_reach=12,
                 lookaround=True):
    """A small random scene whose goal is reachable ignoring visibility.

    Walls are axis-aligned boxes on a 0.25 m grid, the sensor is a cone with
    a random field of view and range, and the goal is a random configuration
    connected to the start through collision-free lattice moves.  The coarse
    default lattice keeps configuration counts in the low thousands.  With
    ``lookaround`` v0 also holds a 360 degree look within the sensor range.
    """
    rng = np.random.default_rng(seed)
    while True:
        w = float(rng.choice(np.arange(2.5, max_size + 1e-9, 0.5)))
        h = float(rng.choice(np.arange(2.5, max_size + 1e-9, 0.5)))
        obstacles = []
        for _ in range(int(rng.integers(0, max_obstacles + 1))):
            x0 = 0.25 * int(rng.integers(0, int(w / 0.25)))
            y0 = 0.25 * int(rng.integers(0, int(h / 0.25)))
            x1 = min(w, x0 + 0.25 * int(rng.integers(1, 7)))
            y1 = min(h, y0 + 0.25 * int(rng.integers(1, 7)))
            obstacles.append(_rect(x0, y0, x1, y1))
        fov = float(rng.choice(RANDOM_FOVS))
        rng_max = float(rng.choice((1.5, 2.5)))
        probe = Scene(
            bounds=(0.0, 0.0, w, h),
            obstacles=obstacles,
            q0=Configuration(0, 0, 0),
            goal=GoalSpec(target=Configuration(0, 0, 0), n_theta=lattice.n_theta),
            sensor=SensorSpec.cone(fov, rng_max),
            lattice=lattice,
        )
        graph = LatticeGraph(probe.grid, probe.robot, probe.sensor, lattice)
        configs = sorted(graph.configurations)
        if len(configs) < min_reach:
            continue
        q0 = configs[int(rng.integers(len(configs)))]
        seen, frontier = {q0}, [q0]
        while frontier:
            nxt = []
            for q in frontier:
                for q2, _ in graph.neighbors(q):
                    if q2 not in seen:
                        seen.add(q2)
                        nxt.append(q2)
            frontier = nxt
        if len(seen) < min_reach:
            continue
        reach = sorted(seen - {q0})
        goal = reach[int(rng.integers(len(reach)))]
        scene = replace(
            probe,
            q0=q0,
            goal=GoalSpec(target=goal, n_theta=lattice.n_theta),
            name=f"random-{seed}",
        )
        return with_lookaround(scene, min(rng_max, LOOKAROUND_RADIUS)) if lookaround else scene
