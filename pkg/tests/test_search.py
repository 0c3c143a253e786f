import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import cell_dijkstra
from vamp.search import BUDGET, EXHAUSTED, GOAL, SearchProblem, astar


def grid_problem(obs, start, goal, heuristic=None, **kw):
    h, w = obs.shape

    def successors(s):
        r, c = s
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                r2, c2 = r + dr, c + dc
                if (dr or dc) and 0 <= r2 < h and 0 <= c2 < w and not obs[r2, c2]:
                    yield (dr, dc), (r2, c2), math.sqrt(2.0) if dr and dc else 1.0

    if heuristic is None:
        heuristic = lambda s: 0.0
    return SearchProblem(start, lambda s: s == goal, successors, heuristic, **kw)


def test_astar_open_grid():
    obs = np.zeros((4, 4), bool)
    sol, stats = astar(grid_problem(obs, (0, 0), (3, 3)))
    assert stats.reason == GOAL
    assert sol.cost == math.sqrt(2.0) * 3
    assert sol.states[0] == (0, 0) and sol.states[-1] == (3, 3)
    assert len(sol.actions) == len(sol.states) - 1


def test_astar_exhausted_and_budget():
    obs = np.zeros((3, 3), bool)
    obs[:, 1] = True
    sol, stats = astar(grid_problem(obs, (0, 0), (0, 2)))
    assert sol is None and stats.reason == EXHAUSTED
    sol, stats = astar(grid_problem(np.zeros((9, 9), bool), (0, 0), (8, 8), node_budget=3))
    assert sol is None and stats.reason == BUDGET and stats.expanded == 3


def test_astar_is_deterministic():
    obs = np.zeros((6, 6), bool)
    a, _ = astar(grid_problem(obs, (0, 0), (5, 2)))
    b, _ = astar(grid_problem(obs, (0, 0), (5, 2)))
    assert a.states == b.states


def test_on_expand_sees_parent_first():
    seen = {}

    def on_expand(s, parent):
        assert parent is None or parent in seen
        seen[s] = parent

    astar(grid_problem(np.zeros((4, 4), bool), (0, 0), (3, 3), on_expand=on_expand))
    assert seen[(0, 0)] is None


@settings(max_examples=40, deadline=None)
@given(arrays(bool, (8, 8), elements=st.booleans()), st.data())
def test_astar_cost_matches_dijkstra(obs, data):
    free = [tuple(p) for p in np.argwhere(~obs)]
    if len(free) < 2:
        return
    i = data.draw(st.integers(0, len(free) - 1))
    j = data.draw(st.integers(0, len(free) - 1))
    start, goal = free[i], free[j]
    dist = cell_dijkstra(obs, [goal], 1.0)
    # Chebyshev-style octile distance is admissible on this grid
    octile = lambda s: max(abs(s[0] - goal[0]), abs(s[1] - goal[1])) + (math.sqrt(2) - 1) * min(
        abs(s[0] - goal[0]), abs(s[1] - goal[1])
    )
    sol, _ = astar(grid_problem(obs, start, goal, octile))
    if math.isinf(dist[start]):
        assert sol is None
    else:
        assert math.isclose(sol.cost, dist[start], rel_tol=1e-12)
