"""Visibility-aware planners over a :class:`~vamp.robot.LatticeGraph`.

Every planner returns a :class:`PathResult`.  A failed search has
``path is None`` and carries the search statistics; ``stats.reason`` tells
exhaustion (``"exhausted"``) apart from a spent budget (``"budget"``).

Viewed regions are passed around as integer bitsets internally; public
arguments accept either :class:`~vamp.geometry.CellSet` or raw bits.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import CellSet, bits_to_mask, distance_field
from .robot import DEFAULT_LATTICE, translation_length
from .search import BUDGET, EXHAUSTED, GOAL, SearchProblem, SearchStats, astar

log = logging.getLogger(__name__)

VB1 = "vb1"
VBINF = "vbinf"


@dataclass
class PlannerConfig:
    """Tuning knobs shared by the planners.

    ``alpha`` defaults to ``1 / lattice.step``.  ``relaxed_timeout`` (s) and
    ``relaxed_node_budget`` bound the depth-one tour search of the VB1
    variant before it falls back to undirected exploration; prefer the node
    budget when reproducible node counts matter.
    """

    alpha: Optional[float] = None
    recursion_limit: float = math.inf
    relaxed_timeout: Optional[float] = 5.0
    relaxed_node_budget: Optional[int] = None
    node_budget: Optional[int] = 200_000
    time_budget: Optional[float] = None
    variant: str = VBINF
    domination: bool = False
    max_iterations: int = 10_000

    def __post_init__(self):
        if self.alpha is not None and self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.recursion_limit < 1:
            raise ValueError("recursion_limit must be >= 1")
        if self.variant not in (VB1, VBINF):
            raise ValueError(f"unknown backchain variant {self.variant!r}")

    @classmethod
    def vb1(cls, **kw):
        kw.setdefault("recursion_limit", 1)
        return cls(variant=VB1, **kw)

    @classmethod
    def vbinf(cls, **kw):
        return cls(variant=VBINF, **kw)


@dataclass
class PathResult:
    path: Optional[list]
    cost: float
    stats: SearchStats
    snapshots: list = field(default_factory=list, repr=False)
    relaxed_violation: float = 0.0
    relaxed: bool = False
    info: dict = field(default_factory=dict, repr=False)

    @property
    def success(self):
        """Goal reached; a tree run with ``extract_path=False`` has no path but succeeds."""
        return self.path is not None or bool(self.info.get("tour_skipped"))

    @property
    def length_m(self):
        if not self.path:
            return 0.0
        lat = self.info.get("lattice", DEFAULT_LATTICE)
        return float(sum(translation_length(a, b, lat) for a, b in zip(self.path, self.path[1:])))

    @property
    def views(self):
        """Viewed region after arriving at each configuration."""
        return self.snapshots


def _bits(x):
    if x is None:
        return 0
    return x.bits if isinstance(x, CellSet) else int(x)


def _failure(stats, **info):
    return PathResult(None, math.inf, stats, info=info)


def _result(graph, path, v_start, cost, stats, relaxed=False, snapshots=True, **info):
    """Build a PathResult, recording views and sweep outside the viewed region."""
    shape = graph.grid.shape
    v = v_start | graph.view_bits(path[0])
    snaps = [v]
    bad = 0
    for a, b in zip(path, path[1:]):
        bad |= graph.sweep_bits(a, b) & ~v
        v |= graph.view_bits(b)
        if snapshots:
            snaps.append(v)
    info.setdefault("lattice", graph.lattice)
    info["final_view"] = v
    return PathResult(
        list(path),
        cost,
        stats,
        [CellSet(s, shape) for s in snaps] if snapshots else [],
        bad.bit_count() * graph.grid.cell_area,
        relaxed,
        info,
    )


def swept_bits(graph, path):
    s = 0
    for a, b in zip(path, path[1:]):
        s |= graph.sweep_bits(a, b)
    return s


def viewed_bits(graph, path):
    v = 0
    for q in path:
        v |= graph.view_bits(q)
    return v


# -- visibility-unaware planning ------------------------------------------------

class PlainPlanner:
    """Shortest paths to a goal set on the optimistic graph, ignoring visibility.

    One backward Dijkstra from all goal configurations gives cost-to-go and a
    successor pointer for every configuration that can reach the goal.
    """

    def __init__(self, graph, goal):
        self.graph = graph
        t0 = time.perf_counter()
        goals = sorted(q for q in graph.configurations if goal(q))
        self.dist = {}
        self.next_hop = {}
        tie = itertools.count()
        heap = [(0.0, next(tie), q, None) for q in goals]
        heapq.heapify(heap)
        closed = 0
        while heap:
            d, _, q, nxt = heapq.heappop(heap)
            if q in self.dist:
                continue
            self.dist[q] = d
            self.next_hop[q] = nxt
            closed += 1
            for q2, c in graph.neighbors(q):
                if q2 not in self.dist:
                    heapq.heappush(heap, (d + c, next(tie), q2, q))
        self.stats = SearchStats(
            expanded=closed, generated=closed, wall_time=time.perf_counter() - t0, reason=GOAL
        )
        self._swept = {}

    def cost_to_go(self, q):
        return self.dist.get(q, math.inf)

    def path(self, q):
        if q not in self.dist:
            return None
        out = [q]
        while self.next_hop[out[-1]] is not None:
            out.append(self.next_hop[out[-1]])
        return out

    def swept_bits(self, q):
        """Union of sweeps along the plain path from ``q`` (memoized)."""
        s = self._swept.get(q)
        if s is not None:
            return s
        chain = []
        cur = q
        while cur not in self._swept:
            nxt = self.next_hop.get(cur)
            if nxt is None:
                self._swept[cur] = 0
                break
            chain.append(cur)
            cur = nxt
        acc = self._swept[cur]
        for c in reversed(chain):
            acc = acc | self.graph.sweep_bits(c, self.next_hop[c])
            self._swept[c] = acc
        return self._swept[q]


def plain_planner(graph, goal):
    cache = graph.__dict__.setdefault("_plain_cache", {})
    try:
        key = hash(goal)
    except TypeError:
        return PlainPlanner(graph, goal)
    pl = cache.get((key, goal))
    if pl is None:
        pl = PlainPlanner(graph, goal)
        cache[(key, goal)] = pl
    return pl


def mp_plain(graph, q, goal):
    """Visibility-unaware shortest path from ``q`` to the goal set."""
    pl = plain_planner(graph, goal)
    path = pl.path(q)
    stats = SearchStats(**vars(pl.stats))
    if path is None:
        stats.reason = EXHAUSTED
        return _failure(stats)
    return _result(graph, path, 0, pl.cost_to_go(q), stats, snapshots=False)


def goal_heuristic(graph, goal):
    """Plain cost-to-go: admissible for every visibility-aware mode."""
    return plain_planner(graph, goal).cost_to_go


# -- belief-space search --------------------------------------------------------

def vamp_bel(graph, q0, goal, v0, cfg=None):
    """A* over belief states (configuration, viewed region).

    Legal moves sweep only viewed cells; arriving at q adds V(q).  The
    heuristic is ``alpha`` times the unviewed swept area of the plain path
    from q.  Repeated belief states are merged exactly, which also removes
    loops that revisit a configuration without seeing anything new.
    """
    cfg = cfg or PlannerConfig()
    alpha = cfg.alpha if cfg.alpha is not None else 1.0 / graph.lattice.step
    plain = plain_planner(graph, goal)
    area = graph.grid.cell_area
    interned = {}

    def intern(v):
        return interned.setdefault(v, v)

    start = (q0, intern(_bits(v0) | graph.view_bits(q0)))

    def successors(state):
        q, v = state
        for q2, c, s in graph.moves_from(q):
            if s & v != s:
                continue
            vq = graph.view_bits(q2)
            v2 = intern(v | vq) if vq & v != vq else v
            yield q2, (q2, v2), c

    def heuristic(state):
        q, v = state
        if alpha == 0.0:
            return 0.0
        if q not in plain.dist:
            return math.inf
        sw = plain.swept_bits(q)
        return alpha * area * (sw.bit_count() - (sw & v).bit_count())

    prune = on_expand = None
    if cfg.domination:
        expanded = {}

        def on_expand(state, _parent):
            q, v = state
            expanded.setdefault(q, []).append((v, best[state]))

        best = {}

        def prune(state, g):
            q, v = state
            for v1, g1 in expanded.get(q, ()):
                if g1 <= g and not v & ~v1:
                    return True
            best[state] = g
            return False

        best[start] = 0.0

    problem = SearchProblem(
        start=start,
        is_goal=lambda s: goal(s[0]),
        successors=successors,
        heuristic=heuristic,
        prune=prune,
        on_expand=on_expand,
        node_budget=cfg.node_budget,
        time_budget=cfg.time_budget,
    )
    sol, stats = astar(problem)
    if sol is None:
        return _failure(stats)
    return _result(graph, [s[0] for s in sol.states], _bits(v0), sol.cost, stats)


# -- local-visibility searches ---------------------------------------------------

def _config_search(graph, q0, goal, v0, heuristic, relaxed, O, decorate, node_budget, time_budget):
    base = _bits(v0)
    out = _bits(O)
    vis = {}
    view = graph.view_bits

    def local_view(q):
        if decorate:
            return vis[q]
        return base | view(q)

    def on_expand(q, parent):
        vis[q] = (vis[parent] if parent is not None else base) | view(q)

    # positive-only bit operations: s & ~v would materialize a negative int
    def successors(q):
        vq = local_view(q)
        for q2, c, s in graph.moves_from(q):
            if relaxed:
                if s & out:
                    continue
                miss = s.bit_count() - (s & vq).bit_count()
                yield q2, q2, c * (miss if miss else 1)
            elif s & vq == s:
                yield q2, q2, c

    problem = SearchProblem(
        start=q0,
        is_goal=goal,
        successors=successors,
        heuristic=heuristic or (lambda q: 0.0),
        on_expand=on_expand if decorate else None,
        node_budget=node_budget,
        time_budget=time_budget,
    )
    sol, stats = astar(problem)
    if sol is None:
        return _failure(stats)
    return _result(graph, sol.states, base, sol.cost, stats, relaxed=relaxed)


def vamp_step_vis(graph, q0, goal, v0, heuristic=None, relaxed=False, O=None,
                  node_budget=200_000, time_budget=None):
    """Configuration-space A* where each move must sweep only v0 plus the view from its source.

    In relaxed mode any move avoiding ``O`` is legal and a move sweeping
    ``k > 0`` unviewed cells costs ``k`` times its length.
    """
    return _config_search(graph, q0, goal, v0, heuristic, relaxed, O, False, node_budget, time_budget)


def vamp_path_vis(graph, q0, goal, v0, heuristic=None, relaxed=False, O=None,
                  node_budget=200_000, time_budget=None):
    """Like :func:`vamp_step_vis`, but each configuration is decorated with the
    view accumulated along the path on which it was first expanded."""
    return _config_search(graph, q0, goal, v0, heuristic, relaxed, O, True, node_budget, time_budget)


def tourist(graph, q0, R, v0, relaxed=False, O=None, node_budget=200_000, time_budget=None):
    """Reach any configuration whose view meets region ``R``.

    Guided by the minimum, over the cells in view, of the geodesic distance
    to ``R``.
    """
    grid = graph.grid
    target = _bits(R) & ~grid.obstacle_mask.bits
    if not target:
        return _failure(SearchStats(reason=EXHAUSTED))
    field_ = distance_field(grid, CellSet(target, grid.shape))
    flat = field_.values.ravel()
    shape = grid.shape
    hcache = {}

    def goal(q):
        return bool(graph.view_bits(q) & target)

    def heuristic(q):
        h = hcache.get(q)
        if h is None:
            vb = graph.view_bits(q)
            if vb & target:
                h = 0.0
            elif not vb:
                h = math.inf
            else:
                h = float(flat[bits_to_mask(vb, shape).ravel()].min())
            hcache[q] = h
        return h

    res = vamp_path_vis(graph, q0, goal, v0, heuristic, relaxed, O, node_budget, time_budget)
    res.info["target"] = target
    return res


# -- tree-visibility tour ---------------------------------------------------------

def _tree_path(parent, depth, a, b):
    """Unique tree path from a to b."""
    up, down = [a], [b]
    while depth[up[-1]] > depth[down[-1]]:
        up.append(parent[up[-1]])
    while depth[down[-1]] > depth[up[-1]]:
        down.append(parent[down[-1]])
    while up[-1] != down[-1]:
        up.append(parent[up[-1]])
        down.append(parent[down[-1]])
    return up + down[-2::-1]


def vamp_tree(graph, q0, goal, v0, node_budget=None, time_budget=None, extract_path=True):
    """Grow a tree with one global viewed region, then tour it in visit order.

    Edges whose sweep is not yet viewed go back on the agenda.  The search
    fails once every pending edge has been retried without the viewed
    region changing.  ``stats.expanded`` is the tree size.
    """
    t0 = time.perf_counter()
    stats = SearchStats(generated=1)
    v = _bits(v0) | graph.view_bits(q0)
    order = [q0]
    parent = {q0: None}
    depth = {q0: 0}
    found = goal(q0)
    agenda = deque((q0, q2) for q2, _ in graph.neighbors(q0))
    stats.generated += len(agenda)
    stale = 0
    reason = EXHAUSTED
    deadline = None if time_budget is None else t0 + time_budget
    while agenda and not found:
        qs, qe = agenda.popleft()
        if qe in parent:
            continue
        s = graph.sweep_bits(qs, qe)
        if s & v != s:
            agenda.append((qs, qe))
            stale += 1
            if stale > len(agenda):
                break
            continue
        stale = 0
        parent[qe] = qs
        depth[qe] = depth[qs] + 1
        order.append(qe)
        if goal(qe):
            found = True
            break
        v |= graph.view_bits(qe)
        new = [(qe, q2) for q2, _ in graph.neighbors(qe) if q2 not in parent]
        agenda.extend(new)
        stats.generated += len(new)
        if node_budget is not None and len(order) >= node_budget:
            reason = BUDGET
            break
        if deadline is not None and time.perf_counter() > deadline:
            reason = BUDGET
            break
    stats.expanded = len(order)
    stats.wall_time = time.perf_counter() - t0
    info = {"tree_order": order, "tree_parent": parent}
    if not found:
        stats.reason = reason
        return _failure(stats, **info)
    stats.reason = GOAL
    if not extract_path:
        res = PathResult(None, math.inf, stats, info=info)
        res.info["tour_skipped"] = True
        return res
    path = [q0]
    for a, b in zip(order, order[1:]):
        path.extend(_tree_path(parent, depth, a, b)[1:])
    cost = sum(graph.distance(a, b) for a, b in zip(path, path[1:]))
    return _result(graph, path, _bits(v0), cost, stats, snapshots=len(path) <= 20_000, **info)


# -- visibility preimage backchaining -----------------------------------------------

class _Tracker:
    """Accumulates statistics and loop counters across sub-searches."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.stats = SearchStats()
        self.counters = {
            "iterations": 0,
            "searches": 0,
            "vavp_calls": 0,
            "vavp_failures": 0,
            "fallback_tours": 0,
            "max_depth": 0,
        }
        self.t0 = time.perf_counter()

    def add(self, res, what=""):
        self.stats += res.stats
        self.counters["searches"] += 1
        log.debug(
            "%s: %s after %d expansions, %.2fs", what, res.stats.reason, res.stats.expanded,
            res.stats.wall_time,
        )
        return res

    def remaining(self):
        if self.cfg.time_budget is None:
            return None
        return max(0.0, self.cfg.time_budget - (time.perf_counter() - self.t0))


def _feasible(res):
    return res.success and res.relaxed_violation == 0.0


def vavp(graph, q, R, v, O, depth=0, cfg=None, tracker=None):
    """Find a feasible path from ``q`` that views part of ``R``, or that views
    part of what a relaxed path to view ``R`` would sweep, recursively.

    ``O`` marks regions no candidate may sweep.  Returned paths are always
    feasible from viewed region ``v``.
    """
    cfg = cfg or PlannerConfig()
    tr = tracker or _Tracker(cfg)
    tr.counters["vavp_calls"] += 1
    tr.counters["max_depth"] = max(tr.counters["max_depth"], depth)
    R, v, O = _bits(R), _bits(v), _bits(O)
    nb = cfg.node_budget
    if not (cfg.variant == VB1 and depth == 0):
        if cfg.variant == VBINF:
            p = tr.add(tourist(graph, q, R, v, True, O, nb, tr.remaining()), f"relaxed tour d={depth}")
            if _feasible(p):
                return p
        else:
            budget = cfg.relaxed_node_budget if cfg.relaxed_node_budget is not None else nb
            timeout = cfg.relaxed_timeout
            rem = tr.remaining()
            if rem is not None:
                timeout = rem if timeout is None else min(timeout, rem)
            p = tr.add(tourist(graph, q, R, v, False, None, budget, timeout), f"tour d={depth}")
            if p.success:
                return p
    if depth >= cfg.recursion_limit:
        tr.counters["vavp_failures"] += 1
        return _failure(SearchStats(reason=EXHAUSTED))
    O_new = O | R
    p_rel = tr.add(tourist(graph, q, R, v, True, O_new, nb, tr.remaining()), f"bounded relaxed tour d={depth}")
    if not p_rel.success:
        tr.counters["vavp_failures"] += 1
        return p_rel
    if _feasible(p_rel):
        return p_rel
    R2 = swept_bits(graph, p_rel.path) & ~v
    if not R2:
        tr.counters["vavp_failures"] += 1
        return _failure(SearchStats(reason=EXHAUSTED))
    return vavp(graph, q, R2, v, O_new, depth + 1, cfg, tr)


def vamp_backchain(graph, q0, goal, v0, cfg=None, heuristic=None):
    """Alternate direct goal attempts with view paths that enable a relaxed goal path.

    Each loop either finishes with a feasible path to the goal or appends a
    feasible path that views new workspace.  ``cfg.variant`` selects VB1
    (depth-one backchaining, bounded tour search, exact sub-planners) or
    VBInf (unbounded recursion, relaxed sub-planners whose output is checked
    for feasibility before use).
    """
    cfg = cfg or PlannerConfig()
    tr = _Tracker(cfg)
    h = heuristic or goal_heuristic(graph, goal)
    v_start = _bits(v0)
    v = v_start | graph.view_bits(q0)
    q = q0
    path = [q0]
    free = graph.grid.free_mask.bits
    nb = cfg.node_budget
    growth = []

    def done(reason, final=None):
        tr.stats.wall_time = time.perf_counter() - tr.t0
        tr.stats.reason = reason
        info = dict(tr.counters)
        info["view_growth"] = growth
        if final is None:
            return _failure(tr.stats, **info)
        cost = sum(graph.distance(a, b) for a, b in zip(final, final[1:]))
        return _result(graph, final, v_start, cost, tr.stats, **info)

    while True:
        tr.counters["iterations"] += 1
        if tr.counters["iterations"] > cfg.max_iterations:
            return done(BUDGET)
        if tr.remaining() == 0.0:
            return done(BUDGET)
        if cfg.variant == VBINF:
            p_rel = tr.add(vamp_path_vis(graph, q, goal, v, h, True, None, nb, tr.remaining()), "relaxed goal")
            if _feasible(p_rel):
                return done(GOAL, path + p_rel.path[1:])
        else:
            p_fin = tr.add(vamp_path_vis(graph, q, goal, v, h, False, None, nb, tr.remaining()), "goal")
            if p_fin.success:
                return done(GOAL, path + p_fin.path[1:])
            p_rel = tr.add(vamp_path_vis(graph, q, goal, v, h, True, None, nb, tr.remaining()), "relaxed goal")
        p_vis = _failure(SearchStats(reason=EXHAUSTED))
        if p_rel.success:
            R = swept_bits(graph, p_rel.path) & ~v
            if R:
                p_vis = vavp(graph, q, R, v, 0, 0, cfg, tr)
        if not p_vis.success:
            tr.counters["fallback_tours"] += 1
            R = free & ~v
            if cfg.variant == VBINF:
                p_vis = tr.add(tourist(graph, q, R, v, True, None, nb, tr.remaining()), "relaxed fallback tour")
            if not _feasible(p_vis):
                p_vis = tr.add(tourist(graph, q, R, v, False, None, nb, tr.remaining()), "fallback tour")
        if not p_vis.success:
            return done(BUDGET if p_vis.stats.reason == BUDGET else EXHAUSTED)
        before = v.bit_count()
        v |= viewed_bits(graph, p_vis.path)
        growth.append(v.bit_count() - before)
        log.debug(
            "iteration %d: %d-step view path to %s, +%d cells",
            tr.counters["iterations"], len(p_vis.path) - 1, tuple(p_vis.path[-1]), growth[-1],
        )
        path.extend(p_vis.path[1:])
        q = p_vis.path[-1]
