"""Command-line entry point: run one planner on a built-in domain or a scene file.

Exit status is 0 when the goal is reached, 3 when the planner proves the
goal unreachable, 4 when a node or time budget ran out and 2 for usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .experiment import EXIT_CODES, PLANNERS, ExperimentSpec, InvalidPathError, format_table, run_experiment
from .scene import SceneError, save_scene

DOMAINS = ("hallway_easy", "hallway_hard", "two_hallway", "sideways_slide", "random")


def build_parser():
    p = argparse.ArgumentParser(prog="vamp", description="Visibility-aware motion planning on a lattice.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scene", help="scene JSON file")
    src.add_argument("--domain", choices=DOMAINS, help="built-in domain")
    p.add_argument("--planner", required=True, choices=PLANNERS)
    p.add_argument("--fov-deg", type=float, help="override the sensor cone width")
    p.add_argument("--node-budget", type=int, default=200_000)
    p.add_argument("--time-budget-s", type=float)
    p.add_argument("--alpha", type=float, help="belief heuristic weight (bel only)")
    p.add_argument("--svg-out", help="write an SVG of the path")
    p.add_argument("--report-out", help="write the JSON report")
    p.add_argument("--seed", type=int, default=0, help="seed for --domain random; planners are deterministic")
    p.add_argument("--save-scene", help="also write the scene that was planned on")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    p = build_parser()
    args = p.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        spec = ExperimentSpec(
            planner=args.planner,
            domain=args.domain,
            scene_path=args.scene,
            fov_deg=args.fov_deg,
            node_budget=args.node_budget,
            time_budget_s=args.time_budget_s,
            alpha=args.alpha,
            svg_out=args.svg_out,
            report_out=args.report_out,
            seed=args.seed,
        )
        if args.save_scene:
            save_scene(spec.load(), args.save_scene)
        report = run_experiment(spec)
    except (SceneError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"vamp: error: {exc}", file=sys.stderr)
        return 2
    except InvalidPathError as exc:
        print(f"vamp: internal error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(format_table([report]))
    return EXIT_CODES[report.status]


if __name__ == "__main__":
    sys.exit(main())
