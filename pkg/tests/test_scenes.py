import json

import numpy as np
import pytest

from sensornet import scenes
from sensornet.cech import cech_at, sample_times, threshold_margin
from sensornet.complex import is_cycle, isomorphic_under
from sensornet.coverage import is_covered_grid, is_covered_homology
from sensornet.geom import SceneError, fence_covers_boundary

TIMES = sample_times(1 / 256)


def test_round_trip(tmp_path, scene_a):
    p = tmp_path / "a.json"
    scenes.save(scene_a, p)
    again = scenes.load(p)
    assert again == scene_a
    assert scenes.dumps(again) == p.read_text()


def test_file_format(scene_a):
    data = json.loads(scenes.dumps(scene_a))
    assert data["format_version"] == 1
    assert {"domain", "radius", "fence", "mobile", "metadata"} <= data.keys()


def _minimal():
    return {
        "format_version": 1,
        "radius": 1.0,
        "domain": {"kind": "rectangle", "min": [0, 0], "max": [4, 4]},
        "fence": [[0, 0]],
        "mobile": [{"keyframes": [[0, 1, 1], [0.5, 2, 2], [1, 1, 1]]}],
    }


def test_decreasing_keyframes_rejected():
    d = _minimal()
    d["mobile"][0]["keyframes"][1][0] = 0.0
    with pytest.raises(SceneError, match="keyframes not increasing"):
        scenes.loads(json.dumps(d))


def test_leaving_domain_rejected():
    d = _minimal()
    d["mobile"].append({"keyframes": [[0, 1, 1], [0.25, 7, 1], [1, 1, 1]]})
    with pytest.raises(SceneError, match=r"trajectory 1 leaves the domain at t=0\.25"):
        scenes.loads(json.dumps(d))


def test_parse_error_has_line_number():
    with pytest.raises(SceneError, match="line 3"):
        scenes.loads('{\n"radius": 1,\n oops\n}')


def test_wrong_version_and_missing_field():
    d = _minimal()
    d["format_version"] = 2
    with pytest.raises(SceneError, match="format_version"):
        scenes.loads(json.dumps(d))
    d = _minimal()
    del d["radius"]
    with pytest.raises(SceneError, match="malformed"):
        scenes.loads(json.dumps(d))


def test_disk_domain_round_trip():
    d = _minimal()
    d["domain"] = {"kind": "disk", "center": [2, 2], "radius": 2}
    d["fence"] = [[2, 0]]
    sc = scenes.loads(json.dumps(d))
    assert scenes.loads(scenes.dumps(sc)) == sc


def test_shared_fence_and_ids(scene_a, scene_b):
    assert scene_a.fence == scene_b.fence
    assert len(scene_a.mobile) == len(scene_b.mobile)
    assert scene_a.metadata == scene_b.metadata


def test_b_mirrors_a_in_the_line(scene_a, scene_b):
    for t in TIMES[::16]:
        a, b = scene_a.positions(t), scene_b.positions(t)
        mirrored = np.column_stack([b[:, 0], 2 * scenes.LINE_Y - b[:, 1]])
        # every sensor agrees with B either directly (lattice, fence) or in the mirror (line)
        same = np.isclose(a, b).all(axis=1) | np.isclose(a, mirrored).all(axis=1)
        assert same.all()


def test_nerves_identical(scene_a, scene_b):
    ident = {i: i for i in range(scene_a.n_sensors)}
    assert all(isomorphic_under(cech_at(scene_a, t), cech_at(scene_b, t), ident) for t in TIMES)


@pytest.mark.parametrize("which", ["A", "B"])
def test_generic_at_samples(which):
    sc = scenes.build_example_A() if which == "A" else scenes.build_example_B()
    assert min(threshold_margin(sc, float(t)) for t in TIMES) >= 1e-3


@pytest.mark.parametrize("which", ["A", "B"])
def test_fence_covers_boundary_throughout(which):
    sc = scenes.build_example_A() if which == "A" else scenes.build_example_B()
    assert all(fence_covers_boundary(sc, float(t)) for t in TIMES[::4])


def test_start_and_end(scene_a):
    start, end = is_covered_homology(scene_a, 0.0), is_covered_homology(scene_a, 1.0)
    assert not start.covered and start.beta1 == 1
    # the flood covers the top half; the retreated bottom half stays open
    assert not end.covered and end.beta1 == 1
    g0, g1 = is_covered_grid(scene_a, 0.0, 1 / 8), is_covered_grid(scene_a, 1.0, 1 / 8)
    assert g0.status == g1.status == "hole"
    assert g0.witness.y > scenes.LINE_Y > g1.witness.y


def test_metadata_loop_is_a_cycle_at_the_fiber_pair(scene_a, scene_b):
    t, t2 = scene_a.metadata["fiber_pair"]
    assert t < t2
    for sc in (scene_a, scene_b):
        loop = [tuple(e) for e in sc.metadata["loop"]]
        assert is_cycle(cech_at(sc, t), loop) and is_cycle(cech_at(sc, t2), loop)
