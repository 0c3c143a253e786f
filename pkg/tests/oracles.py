"""Slow reference implementations used as test oracles.

They share only the rasterizers (footprint, sweep, view) with the package
and do their own move enumeration and search with plain dicts and heapq.
"""

from __future__ import annotations

import heapq
import itertools
import math

import numpy as np

from vamp.robot import Configuration, OutOfBoundsError, config_distance, footprint_cells, swept_cells, visible_cells


def cell_dijkstra(obstacles, sources, cell_size):
    """8-connected Dijkstra on a boolean obstacle grid; diagonals may cut corners."""
    h, w = obstacles.shape
    dist = np.full((h, w), math.inf)
    heap = []
    for r, c in sources:
        if not obstacles[r, c]:
            dist[r, c] = 0.0
            heap.append((0.0, r, c))
    heapq.heapify(heap)
    while heap:
        d, r, c = heapq.heappop(heap)
        if d > dist[r, c]:
            continue
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == dc == 0:
                    continue
                r2, c2 = r + dr, c + dc
                if not (0 <= r2 < h and 0 <= c2 < w) or obstacles[r2, c2]:
                    continue
                nd = d + cell_size * (math.sqrt(2.0) if dr and dc else 1.0)
                if nd < dist[r2, c2]:
                    dist[r2, c2] = nd
                    heapq.heappush(heap, (nd, r2, c2))
    return dist


class Model:
    """Collision-free configurations and moves of a scene, from the rasterizers alone."""

    def __init__(self, scene):
        self.scene = scene
        self.grid = scene.grid
        self.lat = scene.lattice
        self.obs = scene.grid.obstacle_mask
        self._fp, self._sw, self._view = {}, {}, {}
        self.rho = scene.robot.circumradius

    def free(self, q):
        if q not in self._fp:
            try:
                fp = footprint_cells(self.scene.robot, self.grid, q, self.lat)
                self._fp[q] = not (fp & self.obs)
            except OutOfBoundsError:
                self._fp[q] = False
        return self._fp[q]

    def sweep(self, a, b):
        key = (a, b) if a <= b else (b, a)
        if key not in self._sw:
            try:
                s = swept_cells(self.scene.robot, self.grid, a, b, self.lat)
                self._sw[key] = None if s & self.obs else s.bits
            except OutOfBoundsError:
                self._sw[key] = None
        return self._sw[key]

    def view(self, q):
        if q not in self._view:
            self._view[q] = visible_cells(self.scene.sensor, self.grid, q, self.lat).bits
        return self._view[q]

    def moves(self, q):
        n = self.lat.n_theta
        for dx, dy, dt in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)):
            q2 = Configuration(q.ix + dx, q.iy + dy, (q.itheta + dt) % n)
            if q2 == q or not self.free(q2):
                continue
            s = self.sweep(q, q2)
            if s is None:
                continue
            yield q2, config_distance(q, q2, self.lat, self.rho), s

    def reachable(self, q0):
        seen, stack = {q0}, [q0]
        while stack:
            q = stack.pop()
            for q2, _, _ in self.moves(q):
                if q2 not in seen:
                    seen.add(q2)
                    stack.append(q2)
        return seen


def lattice_dijkstra(scene, goal):
    """Plain shortest-path cost from the start to the goal set, ignoring visibility."""
    m = Model(scene)
    dist = {scene.q0: 0.0}
    heap = [(0.0, scene.q0)]
    while heap:
        d, q = heapq.heappop(heap)
        if d > dist[q]:
            continue
        if goal(q):
            return d
        for q2, c, _ in m.moves(q):
            if d + c < dist.get(q2, math.inf):
                dist[q2] = d + c
                heapq.heappush(heap, (d + c, q2))
    return math.inf


def belief_ucs(scene, v0_bits, max_states=2_000_000):
    """Uniform-cost search over (configuration, viewed region) pairs.

    A move is legal when its sweep lies inside the viewed region; arriving
    adds the view.  Returns the optimal cost or inf.
    """
    m = Model(scene)
    q0 = scene.q0
    v = v0_bits | m.view(q0)
    tie = itertools.count()
    best = {(q0, v): 0.0}
    heap = [(0.0, next(tie), q0, v)]
    while heap:
        d, _, q, v = heapq.heappop(heap)
        if d > best[(q, v)]:
            continue
        if scene.goal(q):
            return d
        for q2, c, s in m.moves(q):
            if s & v != s:
                continue
            v2 = v | m.view(q2)
            key = (q2, v2)
            if d + c < best.get(key, math.inf):
                best[key] = d + c
                if len(best) > max_states:
                    raise RuntimeError("belief oracle state limit")
                heapq.heappush(heap, (d + c, next(tie), q2, v2))
    return math.inf


def visibility_closure(scene, v0_bits):
    """Configurations reachable when the robot may first look around everywhere it safely can.

    Moves are reversible, so the goal is reachable by some feasible path iff
    it lies in this fixpoint.
    """
    m = Model(scene)
    v = v0_bits | m.view(scene.q0)
    while True:
        seen, stack = {scene.q0}, [scene.q0]
        while stack:
            q = stack.pop()
            for q2, _, s in m.moves(q):
                if q2 not in seen and s & v == s:
                    seen.add(q2)
                    stack.append(q2)
        nv = v
        for q in seen:
            nv |= m.view(q)
        if nv == v:
            return seen
        v = nv
