"""Describe a scene in JSON, plan on it and check the answer by replay.

Run from the repository root:  python3 demos/custom_scene.py
"""

import json

from vamp.planners import goal_heuristic, vamp_path_vis, vamp_step_vis
from vamp.postprocess import minimize_views, validate_path
from vamp.render import render_svg
from vamp.robot import build_graph
from vamp.scene import SceneError, scene_from_dict, scene_to_dict

# A 5 x 4 m room with a 1 m pillar between start and goal.  The sensor is
# a 200 degree cone out to 2.5 m; the goal faces back toward the start.
doc = {
    "name": "pillar",
    "bounds": [0, 0, 5, 4],
    "obstacles": [[[2.25, 1.5], [2.75, 1.5], [2.75, 2.5], [2.25, 2.5]]],
    "sensor": {"sectors": [{"width_deg": 200, "max_range": 2.5}]},
    "q0": [1.0, 2.0, 0],
    "goal": {"target": [4.0, 2.0, 180]},
}
scene = scene_from_dict(doc)
graph = build_graph(scene)
h = goal_heuristic(graph, scene.goal)
v0 = scene.initial_view()

# Step visibility only trusts what the current pose sees; path visibility
# remembers everything seen on the way, so it can turn into space it
# looked at a few poses earlier.
for name, planner in (("step", vamp_step_vis), ("path", vamp_path_vis)):
    res = planner(graph, scene.q0, scene.goal, v0, h)
    print(f"{name}-vis: {'%.2f m' % res.length_m if res.success else res.stats.reason}, "
          f"{res.stats.expanded} expansions")

res = vamp_path_vis(graph, scene.q0, scene.goal, v0, h)
print("replay:", validate_path(scene, res.path).to_dict())
ann = minimize_views(scene, res.path)
render_svg(scene, res, ann, out="pillar.svg")

# Documents round-trip, and a malformed one points at the bad field.
assert scene_from_dict(json.loads(json.dumps(scene_to_dict(scene)))) == scene
try:
    scene_from_dict({k: v for k, v in doc.items() if k != "goal"})
except SceneError as exc:
    print("rejected:", exc)
