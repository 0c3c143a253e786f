import json

import pytest

from vamp.domains import make_domain, random_scene
from vamp.robot import Configuration
from vamp.scene import SceneError, load_scene, save_scene, scene_from_dict, scene_to_dict

MINIMAL = {"bounds": [0, 0, 3, 3], "obstacles": [], "q0": [1.0, 1.0, 0], "goal": {"target": [2.0, 2.0, 90]}}


def test_minimal_scene_defaults():
    s = scene_from_dict(MINIMAL)
    assert s.cell_size == 0.0625
    assert s.lattice.step == 0.125 and s.lattice.n_theta == 16
    assert s.robot.half_extents == (0.5, 0.5)
    assert s.q0 == Configuration(8, 8, 0)
    assert s.goal.target == Configuration(16, 16, 4)
    assert s.v0_mode == "default"
    assert s.initial_view()


@pytest.mark.parametrize("name", ["hallway_easy", "hallway_hard", "two_hallway", "sideways_slide"])
def test_builtin_domains_round_trip(name, tmp_path):
    scene = make_domain(name)
    path = tmp_path / "s.json"
    save_scene(scene, path)
    back = load_scene(path)
    assert back == scene
    assert back.initial_view() == scene.initial_view()


def test_random_scene_round_trip():
    scene = random_scene(7)
    assert scene_from_dict(json.loads(json.dumps(scene_to_dict(scene)))) == scene


@pytest.mark.parametrize(
    "patch, pointer",
    [
        ({"q0": None}, "/q0"),
        ({"q0": [0.1, 1.0, 0]}, "/q0"),
        ({"goal": {"target": [2, 2]}}, "/goal"),
        ({"bounds": [0, 0, 3]}, "/bounds"),
        ({"v0_mode": "explicit"}, "/v0_cells"),
        ({"extra": 1}, "/"),
    ],
)
def test_bad_documents_name_the_field(patch, pointer):
    doc = dict(MINIMAL)
    for k, v in patch.items():
        if v is None:
            doc.pop(k)
        else:
            doc[k] = v
    with pytest.raises(SceneError) as exc:
        scene_from_dict(doc)
    assert str(exc.value).startswith(pointer)


def test_missing_q0_message():
    doc = {k: v for k, v in MINIMAL.items() if k != "q0"}
    with pytest.raises(SceneError, match="/q0: missing required field 'q0'"):
        scene_from_dict(doc)


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(SceneError):
        load_scene(p)
