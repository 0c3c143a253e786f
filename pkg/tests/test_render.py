import re

from hypothesis import given, settings
from hypothesis import strategies as st

from vamp.postprocess import minimize_views
from vamp.render import render_svg
from vamp.robot import Configuration, SensorSpec
from vamp.scene import GoalSpec, Scene

SCENE = Scene(
    bounds=(0.0, 0.0, 4.0, 3.0),
    obstacles=[[(2.5, 0.0), (2.7, 0.0), (2.7, 1.2), (2.5, 1.2)]],
    q0=Configuration(8, 16, 0),
    goal=GoalSpec(target=Configuration(20, 16, 0)),
    sensor=SensorSpec.cone(90.0),
    name="render",
)
PATH = [Configuration(8 + i, 16, 0) for i in range(7)]


def n_outlines(svg):
    return len(re.findall(r'<polygon class="robot', svg))


def shaded_cells(svg):
    return sum(int(float(w)) for w in re.findall(r'<rect x="[^"]*" y="[^"]*" width="([^"]*)" height="2\.5"/>', svg))


def test_two_step_path_draws_three_outlines():
    svg = render_svg(SCENE, PATH[:3])
    assert n_outlines(svg) == 3
    assert svg.startswith("<?xml") and svg.rstrip().endswith("</svg>")


def test_render_is_byte_identical(tmp_path):
    a = render_svg(SCENE, PATH, out=tmp_path / "a.svg")
    b = render_svg(SCENE, PATH)
    assert a == b == (tmp_path / "a.svg").read_text()


def test_imaging_poses_are_marked():
    ann = minimize_views(SCENE, PATH)
    svg = render_svg(SCENE, PATH, annotated=ann)
    assert svg.count('class="robot imaging"') == ann.n_images


@settings(max_examples=10, deadline=None)
@given(st.integers(1, len(PATH) - 1))
def test_shading_grows_with_prefix(k):
    assert shaded_cells(render_svg(SCENE, PATH[:k])) <= shaded_cells(render_svg(SCENE, PATH[: k + 1]))
