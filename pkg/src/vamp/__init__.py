"""Visibility-aware motion planning on a state lattice.

A robot may only move through space it has already seen.  The planners
here search over lattice configurations while tracking the viewed region,
from exact belief-space search to fast backchaining heuristics.
"""

from .domains import make_domain, random_scene
from .experiment import ExperimentSpec, Report, format_table, run_experiment, run_planner
from .geometry import CellSet, WorkGrid, distance_field, line_of_sight, rasterize_obstacles
from .planners import (
    PathResult,
    PlannerConfig,
    mp_plain,
    tourist,
    vamp_backchain,
    vamp_bel,
    vamp_path_vis,
    vamp_step_vis,
    vamp_tree,
    vavp,
)
from .postprocess import AnnotatedPath, ValidationReport, minimize_views, path_metrics, validate_path
from .render import render_svg
from .robot import (
    Configuration,
    Lattice,
    LatticeGraph,
    RobotSpec,
    Sector,
    SensorSpec,
    build_graph,
    footprint_cells,
    swept_cells,
    visible_cells,
)
from .scene import GoalSpec, Scene, SceneError, load_scene, save_scene

__all__ = [
    "AnnotatedPath", "CellSet", "Configuration", "ExperimentSpec", "GoalSpec", "Lattice", "LatticeGraph",
    "PathResult", "PlannerConfig", "Report", "RobotSpec", "Scene", "SceneError", "Sector", "SensorSpec",
    "ValidationReport", "WorkGrid", "build_graph", "distance_field", "footprint_cells", "format_table",
    "line_of_sight", "load_scene", "make_domain", "minimize_views", "mp_plain", "path_metrics",
    "random_scene", "rasterize_obstacles", "render_svg", "run_experiment", "run_planner", "save_scene",
    "swept_cells", "tourist", "validate_path", "vamp_backchain", "vamp_bel", "vamp_path_vis",
    "vamp_step_vis", "vamp_tree", "vavp", "visible_cells",
]
