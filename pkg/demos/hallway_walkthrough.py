"""Drive every planner down the L-shaped hallway and compare the results.

Run from the repository root:  python3 demos/hallway_walkthrough.py
Writes hallway_<planner>.svg into the current directory.
"""

from vamp.domains import make_domain
from vamp.experiment import format_table, run_experiment, ExperimentSpec
from vamp.robot import build_graph

scene = make_domain("hallway_easy")
graph = build_graph(scene)
print(f"{scene.name}: {len(graph)} collision-free configurations, "
      f"{len(scene.initial_view())} cells viewed before moving")

# Step visibility stalls at the corner: no single pose sees enough of the
# turn.  The tree planner succeeds but its length is the full tour of the
# tree it grew.  The belief planner is exact but tracks every distinct
# viewed region, so it runs out of its 50k node budget.
reports = []
for planner in ("step", "path", "tree", "vb1", "vbinf", "bel"):
    spec = ExperimentSpec(planner=planner, domain="hallway_easy", node_budget=50_000,
                          svg_out=f"hallway_{planner}.svg")
    reports.append(run_experiment(spec))
print(format_table(reports))

# Imaging at every pose is wasteful: views_minimized is the number of
# poses that actually need a picture for the path to stay safe.
best = min((r for r in reports if r.solved), key=lambda r: r.length_m)
print(f"shortest: {best.planner}, {best.length_m:.2f} m, "
      f"{best.views_minimized} of {best.views_total} images needed")
