"""Problem instances and their JSON file format.

Files use meters for lengths and degrees for angles.  Poses are written as
``[x, y, theta_deg]`` and must lie on the lattice.  Minimal example::

    {"bounds": [0, 0, 4, 4], "obstacles": [],
     "q0": [1.0, 1.0, 0], "goal": {"target": [3.0, 3.0, 90]}}

Everything else falls back to the defaults documented in ``SCENE_SCHEMA``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import jsonschema

from .geometry import CellSet, rasterize_obstacles
from .robot import (
    DEFAULT_LATTICE,
    Configuration,
    Lattice,
    RobotSpec,
    Sector,
    SensorSpec,
    footprint_cells,
    visible_cells,
)

_POSE = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

SCENE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["bounds", "obstacles", "q0", "goal"],
    "properties": {
        "name": {"type": "string"},
        "bounds": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
        "cell_size": {"type": "number", "exclusiveMinimum": 0, "default": 0.0625},
        "obstacles": {"type": "array", "items": {"type": "array", "items": _POINT}},
        "robot": {
            "type": "object",
            "properties": {
                "half_extents": _POINT,
                "boundary_samples": {"type": "integer", "minimum": 8},
                "interp_step": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "sensor": {
            "type": "object",
            "properties": {
                "sectors": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["width_deg"],
                        "properties": {
                            "offset_deg": {"type": "number"},
                            "width_deg": {"type": "number", "exclusiveMinimum": 0, "maximum": 360},
                            "min_range": {"type": "number", "minimum": 0},
                            "max_range": {"type": "number", "exclusiveMinimum": 0},
                        },
                        "additionalProperties": False,
                    },
                },
                "mount": _POINT,
            },
            "additionalProperties": False,
        },
        "lattice": {
            "type": "object",
            "properties": {
                "step": {"type": "number", "exclusiveMinimum": 0},
                "n_theta": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "q0": _POSE,
        "goal": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["target"],
                    "properties": {"target": _POSE, "tolerance": _POSE},
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "required": ["configs"],
                    "properties": {"configs": {"type": "array", "minItems": 1, "items": _POSE}},
                    "additionalProperties": False,
                },
            ]
        },
        "v0_mode": {"enum": ["default", "explicit"], "default": "default"},
        "v0_cells": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        },
    },
    "additionalProperties": False,
}


class SceneError(ValueError):
    """Invalid scene document; ``pointer`` is a JSON pointer to the offending spot."""

    def __init__(self, pointer, message):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


@dataclass(frozen=True)
class GoalSpec:
    """Goal region on the lattice.

    Either a target configuration with per-axis tolerances in lattice units
    (``tol = (ix, iy, itheta)``) or an explicit configuration set.
    """

    target: Optional[Configuration] = None
    tol: tuple = (0, 0, 0)
    configs: Optional[frozenset] = None
    n_theta: int = DEFAULT_LATTICE.n_theta

    def __post_init__(self):
        if (self.target is None) == (self.configs is None):
            raise ValueError("goal needs exactly one of target / configs")
        if self.configs is not None:
            if not self.configs:
                raise ValueError("explicit goal set is empty")
            object.__setattr__(self, "configs", frozenset(Configuration(*c) for c in self.configs))
        else:
            object.__setattr__(self, "target", Configuration(*self.target))
            object.__setattr__(self, "tol", tuple(int(t) for t in self.tol))

    def __call__(self, q):
        if self.configs is not None:
            return q in self.configs
        t = self.target
        if abs(q.ix - t.ix) > self.tol[0] or abs(q.iy - t.iy) > self.tol[1]:
            return False
        d = (q.itheta - t.itheta) % self.n_theta
        return min(d, self.n_theta - d) <= self.tol[2]

    def members(self, configurations):
        return sorted(q for q in configurations if self(q))


def _as_polygon(poly):
    return tuple((float(x), float(y)) for x, y in poly)


@dataclass(frozen=True)
class Scene:
    """A planning problem: workspace, robot, sensor, start, goal and initial view."""

    bounds: tuple
    obstacles: tuple
    q0: Configuration
    goal: GoalSpec
    cell_size: float = 0.0625
    robot: RobotSpec = field(default_factory=RobotSpec)
    sensor: SensorSpec = field(default_factory=SensorSpec)
    lattice: Lattice = DEFAULT_LATTICE
    v0_mode: str = "default"
    v0_cells: Optional[tuple] = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple(float(b) for b in self.bounds))
        object.__setattr__(self, "obstacles", tuple(_as_polygon(p) for p in self.obstacles))
        object.__setattr__(self, "q0", Configuration(*self.q0))
        if self.v0_mode not in ("default", "explicit"):
            raise ValueError("v0_mode must be 'default' or 'explicit'")
        if self.v0_mode == "explicit":
            if self.v0_cells is None:
                raise ValueError("explicit v0 needs v0_cells")
            cells = tuple(sorted((int(r), int(c)) for r, c in self.v0_cells))
            object.__setattr__(self, "v0_cells", cells)

    @cached_property
    def grid(self):
        return rasterize_obstacles(self.bounds, self.cell_size, self.obstacles)

    def with_sensor(self, sensor):
        from dataclasses import replace

        return replace(self, sensor=sensor)

    def with_fov(self, fov_deg):
        s = self.sensor
        first = s.sectors[0]
        return self.with_sensor(
            SensorSpec.cone(fov_deg, first.max_range, first.min_range, s.mount)
        )

    def initial_view(self):
        """v0: explicit cells, or the start view plus the start footprint."""
        if self.v0_mode == "explicit":
            return CellSet.from_cells(self.grid.shape, self.v0_cells)
        g = self.grid
        return visible_cells(self.sensor, g, self.q0, self.lattice) | footprint_cells(
            self.robot, g, self.q0, self.lattice
        )


# -- JSON ----------------------------------------------------------------------

def _pointer(path):
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


def _validate(doc):
    validator = jsonschema.Draft7Validator(SCENE_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), str(e.absolute_path)))
    if not errors:
        return
    err = errors[0]
    path = list(err.absolute_path)
    if err.validator == "required" and isinstance(err.instance, dict):
        missing = [p for p in err.validator_value if p not in err.instance]
        if missing:
            raise SceneError(_pointer(path + [missing[0]]), f"missing required field {missing[0]!r}")
    raise SceneError(_pointer(path), err.message)


def _pose_to_config(pose, lattice, where):
    x, y, th_deg = pose
    ix, iy = x / lattice.step, y / lattice.step
    it = th_deg / (360.0 / lattice.n_theta)
    if max(abs(ix - round(ix)), abs(iy - round(iy)), abs(it - round(it))) > 1e-6:
        raise SceneError(where, f"pose {list(pose)} is not on the lattice")
    return Configuration(int(round(ix)), int(round(iy)), int(round(it)) % lattice.n_theta)


def _config_to_pose(q, lattice):
    return [q.ix * lattice.step, q.iy * lattice.step, _deg(q.itheta * 360.0 / lattice.n_theta)]


def _deg(x):
    return round(float(x), 9)


def scene_from_dict(doc):
    _validate(doc)
    lat = Lattice(**doc.get("lattice", {}))
    r = doc.get("robot", {})
    robot = RobotSpec(
        half_extents=tuple(r.get("half_extents", (0.5, 0.5))),
        boundary_samples=r.get("boundary_samples", 32),
        interp_step=r.get("interp_step", 0.0625),
    )
    s = doc.get("sensor", {})
    if "sectors" in s:
        sectors = tuple(
            Sector(
                math.radians(sec.get("offset_deg", 0.0)),
                math.radians(sec["width_deg"]),
                sec.get("min_range", 0.0),
                sec.get("max_range", 2.5),
            )
            for sec in s["sectors"]
        )
    else:
        sectors = SensorSpec().sectors
    sensor = SensorSpec(sectors, tuple(s.get("mount", (0.0, 0.0))))
    q0 = _pose_to_config(doc["q0"], lat, "/q0")
    gdoc = doc["goal"]
    if "target" in gdoc:
        target = _pose_to_config(gdoc["target"], lat, "/goal/target")
        tx, ty, tth = gdoc.get("tolerance", (0.0, 0.0, 0.0))
        tol = (
            int(math.floor(tx / lat.step + 1e-9)),
            int(math.floor(ty / lat.step + 1e-9)),
            int(math.floor(tth / (360.0 / lat.n_theta) + 1e-9)),
        )
        goal = GoalSpec(target=target, tol=tol, n_theta=lat.n_theta)
    else:
        configs = frozenset(
            _pose_to_config(p, lat, f"/goal/configs/{i}") for i, p in enumerate(gdoc["configs"])
        )
        goal = GoalSpec(configs=configs, n_theta=lat.n_theta)
    mode = doc.get("v0_mode", "default")
    cells = doc.get("v0_cells")
    if mode == "explicit" and cells is None:
        raise SceneError("/v0_cells", "explicit v0_mode requires v0_cells")
    try:
        return Scene(
            bounds=tuple(doc["bounds"]),
            obstacles=tuple(doc["obstacles"]),
            q0=q0,
            goal=goal,
            cell_size=doc.get("cell_size", 0.0625),
            robot=robot,
            sensor=sensor,
            lattice=lat,
            v0_mode=mode,
            v0_cells=tuple(map(tuple, cells)) if mode == "explicit" else None,
            name=doc.get("name", ""),
        )
    except ValueError as exc:
        raise SceneError("", str(exc)) from exc


def scene_to_dict(scene):
    lat = scene.lattice
    doc = {
        "name": scene.name,
        "bounds": list(scene.bounds),
        "cell_size": scene.cell_size,
        "obstacles": [[list(p) for p in poly] for poly in scene.obstacles],
        "robot": {
            "half_extents": list(scene.robot.half_extents),
            "boundary_samples": scene.robot.boundary_samples,
            "interp_step": scene.robot.interp_step,
        },
        "sensor": {
            "sectors": [
                {
                    "offset_deg": _deg(math.degrees(s.offset)),
                    "width_deg": _deg(math.degrees(s.width)),
                    "min_range": s.min_range,
                    "max_range": s.max_range,
                }
                for s in scene.sensor.sectors
            ],
            "mount": list(scene.sensor.mount),
        },
        "lattice": {"step": lat.step, "n_theta": lat.n_theta},
        "q0": _config_to_pose(scene.q0, lat),
        "v0_mode": scene.v0_mode,
    }
    g = scene.goal
    if g.configs is not None:
        doc["goal"] = {"configs": [_config_to_pose(q, lat) for q in sorted(g.configs)]}
    else:
        doc["goal"] = {
            "target": _config_to_pose(g.target, lat),
            "tolerance": [g.tol[0] * lat.step, g.tol[1] * lat.step, _deg(g.tol[2] * 360.0 / lat.n_theta)],
        }
    if scene.v0_mode == "explicit":
        doc["v0_cells"] = [list(c) for c in scene.v0_cells]
    return doc


def load_scene(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneError("", f"invalid JSON: {exc}") from exc
    return scene_from_dict(doc)


def save_scene(scene, path):
    with open(path, "w") as fh:
        json.dump(scene_to_dict(scene), fh, indent=1)
        fh.write("\n")
