"""Best-first (A*) search over hashable states with budgets and statistics."""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Optional

GOAL = "goal"
EXHAUSTED = "exhausted"
BUDGET = "budget"


def _zero(_state):
    return 0.0


@dataclass
class SearchProblem:
    """Inputs to :func:`astar`.

    ``successors(state)`` yields ``(action, next_state, step_cost)`` with
    non-negative costs.  ``prune(next_state, g)`` may discard a generated
    state; ``on_expand(state, parent)`` is called once per expanded state,
    before its successors are generated (``parent`` is None for the start).
    """

    start: Hashable
    is_goal: Callable[[Any], bool]
    successors: Callable[[Any], Iterable[tuple]]
    heuristic: Callable[[Any], float] = _zero
    prune: Optional[Callable[[Any, float], bool]] = None
    on_expand: Optional[Callable[[Any, Any], None]] = None
    node_budget: Optional[int] = None
    time_budget: Optional[float] = None


@dataclass
class SearchStats:
    expanded: int = 0
    generated: int = 0
    wall_time: float = 0.0
    peak_open: int = 0
    reason: str = ""

    def __iadd__(self, other):
        self.expanded += other.expanded
        self.generated += other.generated
        self.wall_time += other.wall_time
        self.peak_open = max(self.peak_open, other.peak_open)
        return self


@dataclass
class Solution:
    states: list
    actions: list
    cost: float
    stats: SearchStats = field(default_factory=SearchStats)


def astar(problem):
    """Run A* and return ``(solution or None, stats)``.

    Closed states are never reopened.  Ties on f are broken by lower h, then
    by insertion order, so identical inputs give identical outputs.
    """
    t0 = time.perf_counter()
    stats = SearchStats(generated=1)
    h = problem.heuristic
    counter = itertools.count()
    start = problem.start
    h0 = h(start)
    open_heap = [(h0, h0, next(counter), 0.0, start)]
    best_g = {start: 0.0}
    parent = {start: (None, None)}
    closed = set()
    deadline = None if problem.time_budget is None else t0 + problem.time_budget
    budget = problem.node_budget

    def finish(reason, sol=None):
        stats.reason = reason
        stats.wall_time = time.perf_counter() - t0
        if sol is not None:
            sol.stats = stats
        return sol, stats

    while open_heap:
        _, _, _, g, state = heapq.heappop(open_heap)
        if state in closed or g > best_g[state]:
            continue
        if problem.on_expand is not None:
            problem.on_expand(state, parent[state][0])
        if problem.is_goal(state):
            stats.expanded += 1
            states, actions = [state], []
            while True:
                prev, act = parent[states[-1]]
                if prev is None:
                    break
                states.append(prev)
                actions.append(act)
            states.reverse()
            actions.reverse()
            return finish(GOAL, Solution(states, actions, g))
        if budget is not None and stats.expanded >= budget:
            return finish(BUDGET)
        if deadline is not None and time.perf_counter() > deadline:
            return finish(BUDGET)
        closed.add(state)
        stats.expanded += 1
        for action, nxt, cost in problem.successors(state):
            if nxt in closed:
                continue
            g2 = g + cost
            old = best_g.get(nxt)
            if old is not None and g2 >= old:
                continue
            if problem.prune is not None and problem.prune(nxt, g2):
                continue
            best_g[nxt] = g2
            parent[nxt] = (state, action)
            h2 = h(nxt)
            heapq.heappush(open_heap, (g2 + h2, h2, next(counter), g2, nxt))
            stats.generated += 1
        if len(open_heap) > stats.peak_open:
            stats.peak_open = len(open_heap)
    return finish(EXHAUSTED)
