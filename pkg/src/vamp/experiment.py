"""Run one planner on one scene and summarize the outcome.

A report row carries the metrics of the benchmark table: path length,
closed (expanded) nodes, wall time, plus how many imaging poses the path
needs before and after view minimization.  Every solved row has been
replayed through the validator; a planner path that fails validation is an
error, never a solved row.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

from .domains import make_domain, random_scene
from .planners import (
    PlannerConfig,
    goal_heuristic,
    vamp_backchain,
    vamp_bel,
    vamp_path_vis,
    vamp_step_vis,
    vamp_tree,
)
from .postprocess import minimize_views, validate_path
from .render import render_svg
from .robot import build_graph
from .scene import load_scene
from .search import BUDGET, GOAL

PLANNERS = ("bel", "step", "path", "tree", "vb1", "vbinf")

SOLVED = "solved"
INFEASIBLE = "infeasible"
BUDGET_EXHAUSTED = "budget"


class InvalidPathError(RuntimeError):
    """A planner returned a path the validator rejects."""


@dataclass
class ExperimentSpec:
    """One planner run.  Give either ``domain`` or ``scene_path``.

    ``domain="random"`` draws a random scene from ``seed``; the seed never
    reaches the planners, which are deterministic.
    """

    planner: str
    domain: Optional[str] = None
    scene_path: Optional[str] = None
    fov_deg: Optional[float] = None
    node_budget: Optional[int] = 200_000
    time_budget_s: Optional[float] = None
    alpha: Optional[float] = None
    svg_out: Optional[str] = None
    report_out: Optional[str] = None
    seed: int = 0

    def __post_init__(self):
        if self.planner not in PLANNERS:
            raise ValueError(f"unknown planner {self.planner!r}; expected one of {', '.join(PLANNERS)}")
        if (self.domain is None) == (self.scene_path is None):
            raise ValueError("give exactly one of domain or scene_path")
        if self.fov_deg is not None and not 0.0 < self.fov_deg <= 360.0:
            raise ValueError("fov_deg must be in (0, 360]")
        if self.node_budget is not None and self.node_budget <= 0:
            raise ValueError("node_budget must be positive")
        if self.time_budget_s is not None and self.time_budget_s <= 0:
            raise ValueError("time_budget_s must be positive")

    def load(self):
        if self.domain == "random":
            scene = random_scene(self.seed)
        elif self.domain is not None:
            return make_domain(self.domain, self.fov_deg)
        else:
            scene = load_scene(self.scene_path)
        return scene if self.fov_deg is None else scene.with_fov(self.fov_deg)


@dataclass
class Report:
    domain: str
    planner: str
    fov_deg: Optional[float]
    solved: bool
    length_m: float
    closed_nodes: int
    time_s: float
    views_total: int
    views_minimized: int
    status: str = ""

    def to_dict(self):
        return asdict(self)


def _fov_of(scene):
    """Total angular width of the sensor in degrees."""
    return round(sum(math.degrees(s.width) for s in scene.sensor.sectors), 6)


def run_planner(planner, scene, graph=None, cfg=None):
    """Dispatch ``planner`` on ``scene``; returns the planner's PathResult."""
    graph = graph or build_graph(scene)
    cfg = cfg or PlannerConfig()
    v0 = scene.initial_view()
    q0, goal = scene.q0, scene.goal
    nb, tb = cfg.node_budget, cfg.time_budget
    if planner == "bel":
        return vamp_bel(graph, q0, goal, v0, cfg)
    if planner == "step":
        return vamp_step_vis(graph, q0, goal, v0, goal_heuristic(graph, goal), node_budget=nb, time_budget=tb)
    if planner == "path":
        return vamp_path_vis(graph, q0, goal, v0, goal_heuristic(graph, goal), node_budget=nb, time_budget=tb)
    if planner == "tree":
        return vamp_tree(graph, q0, goal, v0, nb, tb)
    if planner == "vb1":
        return vamp_backchain(graph, q0, goal, v0, PlannerConfig.vb1(**_knobs(cfg)))
    if planner == "vbinf":
        return vamp_backchain(graph, q0, goal, v0, PlannerConfig.vbinf(**_knobs(cfg)))
    raise ValueError(f"unknown planner {planner!r}")


def _knobs(cfg):
    keys = ("alpha", "node_budget", "time_budget", "relaxed_node_budget", "relaxed_timeout")
    return {k: getattr(cfg, k) for k in keys}


def run_experiment(spec):
    """Run ``spec`` and return a Report; writes the SVG and JSON report if asked."""
    scene = spec.load()
    graph = build_graph(scene)
    cfg = PlannerConfig(alpha=spec.alpha, node_budget=spec.node_budget, time_budget=spec.time_budget_s)
    res = run_planner(spec.planner, scene, graph, cfg)
    views_total = views_min = 0
    if res.path:
        rep = validate_path(scene, res.path)
        if not rep.feasible:
            raise InvalidPathError(
                f"{spec.planner} path fails validation at edge {rep.first_violating_edge_index}"
            )
        ann = minimize_views(scene, res.path)
        views_total, views_min = len(res.path), ann.n_images
        if spec.svg_out:
            render_svg(scene, res, ann, out=spec.svg_out)
    reason = res.stats.reason
    status = SOLVED if res.success and reason == GOAL else BUDGET_EXHAUSTED if reason == BUDGET else INFEASIBLE
    report = Report(
        domain=scene.name or (spec.domain or spec.scene_path),
        planner=spec.planner,
        fov_deg=_fov_of(scene),
        solved=status == SOLVED,
        length_m=round(res.length_m, 6),
        closed_nodes=int(res.stats.expanded),
        time_s=round(res.stats.wall_time, 6),
        views_total=views_total,
        views_minimized=views_min,
        status=status,
    )
    if spec.report_out:
        with open(spec.report_out, "w") as fh:
            json.dump(report.to_dict(), fh, indent=1)
            fh.write("\n")
    return report


_COLUMNS = (
    ("domain", "{}"),
    ("planner", "{}"),
    ("fov_deg", "{:g}"),
    ("solved", "{}"),
    ("length_m", "{:.2f}"),
    ("closed_nodes", "{}"),
    ("time_s", "{:.2f}"),
    ("views_total", "{}"),
    ("views_minimized", "{}"),
)


def format_table(reports):
    """Plain-text table, one row per report."""
    rows = [[name for name, _ in _COLUMNS]]
    for r in reports:
        d = r.to_dict() if isinstance(r, Report) else r
        rows.append([fmt.format(d[name]) if d[name] is not None else "-" for name, fmt in _COLUMNS])
    widths = [max(len(row[i]) for row in rows) for i in range(len(_COLUMNS))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows) + "\n"


EXIT_CODES = {SOLVED: 0, INFEASIBLE: 3, BUDGET_EXHAUSTED: 4}
