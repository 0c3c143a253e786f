import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import cell_dijkstra
from vamp.geometry import CellSet, WorkGrid, distance_field, line_of_sight, rasterize_obstacles

SHAPE = (5, 7)
masks = arrays(bool, SHAPE)


def test_cellset_roundtrip_and_membership():
    cells = [(0, 0), (2, 3), (4, 6)]
    s = CellSet.from_cells(SHAPE, cells)
    assert list(s) == cells
    assert len(s) == 3
    assert (2, 3) in s and (1, 1) not in s and (9, 9) not in s
    assert CellSet.from_mask(s.to_mask()) == s


def test_cellset_rejects_foreign_cells_and_grids():
    with pytest.raises(ValueError):
        CellSet.from_cells(SHAPE, [(5, 0)])
    with pytest.raises(ValueError):
        CellSet(1 << 35, SHAPE)
    with pytest.raises(ValueError):
        CellSet.empty(SHAPE) | CellSet.empty((7, 5))


@given(masks, masks)
def test_cellset_ops_match_numpy(a, b):
    A, B = CellSet.from_mask(a), CellSet.from_mask(b)
    assert np.array_equal((A | B).to_mask(), a | b)
    assert np.array_equal((A & B).to_mask(), a & b)
    assert np.array_equal((A - B).to_mask(), a & ~b)
    assert (A <= B) == bool(not (a & ~b).any())
    assert A.isdisjoint(B) == bool(not (a & b).any())
    assert len(A) == int(a.sum())


def test_rasterize_uses_cell_centers():
    grid = rasterize_obstacles((0, 0, 1, 1), 0.25, [[(0, 0), (0.5, 0), (0.5, 0.5), (0, 0.5)]])
    assert grid.shape == (4, 4)
    expect = np.zeros((4, 4), bool)
    expect[:2, :2] = True
    assert np.array_equal(grid.obstacles, expect)


def test_rasterize_rejects_bad_input():
    with pytest.raises(ValueError):
        rasterize_obstacles((0, 0, 0, 1), 0.25, [])
    with pytest.raises(ValueError):
        rasterize_obstacles((0, 0, 1, 1), 0.25, [[(0, 0), (1, 1)]])


def test_line_of_sight_blocked_by_wall():
    grid = rasterize_obstacles((0, 0, 2, 2), 0.125, [[(0.9, 0), (1.1, 0), (1.1, 1.5), (0.9, 1.5)]])
    assert not line_of_sight(grid, (0.5, 0.5), (1.5, 0.5))
    assert line_of_sight(grid, (0.5, 1.8), (1.5, 1.8))
    assert not line_of_sight(grid, (0.5, 0.5), (3.0, 0.5))


def test_distance_field_straight_and_diagonal():
    grid = WorkGrid((0.0, 0.0), 0.5, 3, 3, np.zeros((3, 3), bool))
    f = distance_field(grid, CellSet.from_cells(grid.shape, [(0, 0)]))
    assert f[(0, 2)] == 1.0
    assert f[(2, 2)] == pytest.approx(math.sqrt(2.0))
    assert f.min_over(CellSet.from_cells(grid.shape, [(2, 2), (0, 1)])) == 0.5
    assert f.min_over(CellSet.empty(grid.shape)) == math.inf


def test_distance_field_unreachable_and_empty_source():
    obs = np.zeros((3, 3), bool)
    obs[:, 1] = True
    grid = WorkGrid((0.0, 0.0), 1.0, 3, 3, obs)
    f = distance_field(grid, CellSet.from_cells(grid.shape, [(0, 0)]))
    assert f[(0, 2)] == math.inf and f[(0, 1)] == math.inf
    with pytest.raises(ValueError):
        distance_field(grid, CellSet.from_cells(grid.shape, [(1, 1)]))


@settings(max_examples=40, deadline=None)
@given(
    arrays(bool, st.tuples(st.integers(1, 24), st.integers(1, 24)), elements=st.booleans()),
    st.data(),
)
def test_distance_field_matches_cell_dijkstra(obs, data):
    free = np.argwhere(~obs)
    if len(free) == 0:
        return
    i = data.draw(st.integers(0, len(free) - 1))
    src = [tuple(free[i])]
    grid = WorkGrid((0.0, 0.0), 0.0625, obs.shape[1], obs.shape[0], obs)
    got = distance_field(grid, CellSet.from_cells(grid.shape, src)).values
    assert np.array_equal(got, cell_dijkstra(obs, src, 0.0625))
