import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import upward_ray_parity
from scenegen import random_static, static_scene
from sensornet.cech import cech_at, sample_times
from sensornet.complex import betti
from sensornet.distinguish import (
    DIFFERENT,
    IDENTICAL,
    NOT_HOMOTOPY_EQUIVALENT,
    OBSTRUCTION,
    compare_timelines,
    full_report,
    loop_image,
    pair_profile,
    winding_parity,
)
from sensornet.geom import Scene, Trajectory

RING = [(3 + 1.8 * np.cos(a), 3 + 1.8 * np.sin(a)) for a in np.linspace(0, 2 * np.pi, 10, endpoint=False)]
LOOP = [(i, (i + 1) % 10) for i in range(10)]


def ring_scene():
    return static_scene(RING, fence=False)


def filling_scene():
    """A ring of sensors around a hole; a lone sensor walks in and fills it."""
    base = ring_scene()
    mover = Trajectory(((0, (0.3, 0.3)), (0.4, (0.3, 0.3)), (0.6, (3, 3)), (1, (3, 3))))
    return Scene(base.domain, 1.0, (), list(base.mobile) + [mover])


class TestCompareTimelines:
    def test_self(self):
        sc = random_static(random.Random(1), 0.01)
        assert all(ok for _, ok in compare_timelines(sc, sc, 1 / 16))

    def test_extra_sensor(self):
        sc = static_scene([(2, 2)])
        more = static_scene([(2, 2), (5, 5)])
        with pytest.raises(ValueError, match="sensor id"):
            compare_timelines(sc, more)

    def test_identical_tables_imply_equal_betti(self, scene_a, scene_b):
        table = compare_timelines(scene_a, scene_b, 1 / 64)
        assert all(ok for _, ok in table)
        for t, _ in table:
            Ka, Kb = cech_at(scene_a, t), cech_at(scene_b, t)
            assert (betti(Ka, 0), betti(Ka, 1)) == (betti(Kb, 0), betti(Kb, 1))


class TestPairProfile:
    def test_static(self):
        p = pair_profile(ring_scene(), 0.2, 0.8)
        assert p.beta1_t == p.beta1_t2 == p.rank_incl == 1 and p.monotone

    def test_hole_filled(self):
        p = pair_profile(filling_scene(), 0.0, 1.0)
        assert p.beta1_t == 1 and p.beta1_t2 == 0
        assert p.rank_incl == p.beta1_t - 1

    def test_rejects_reversed_times(self):
        with pytest.raises(ValueError):
            pair_profile(ring_scene(), 0.5, 0.5)

    def test_rejects_shrinking_nerve(self):
        leaving = Scene(ring_scene().domain, 1.0, RING, [Trajectory(((0, (3, 3)), (1, (0.3, 0.3))))])
        with pytest.raises(ValueError, match="not a subcomplex"):
            pair_profile(leaving, 0.0, 1.0)

    @pytest.mark.parametrize("which", ["a", "b"])
    def test_functoriality_across_the_fiber_pair(self, which, scene_a, scene_b):
        sc = scene_a if which == "a" else scene_b
        t, t3 = sc.metadata["fiber_pair"]
        t2 = 0.5 * (t + t3)
        p12, p23, p13 = pair_profile(sc, t, t2), pair_profile(sc, t2, t3), pair_profile(sc, t, t3)
        assert p12.monotone and p23.monotone and p13.monotone
        assert p13.rank_incl <= min(p12.rank_incl, p23.rank_incl)
        for p in (p12, p23, p13):
            assert p.rank_incl <= min(p.beta1_t, p.beta1_t2)


class TestWinding:
    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=3, max_size=9),
        st.lists(st.tuples(st.floats(-6, 6), st.floats(-6, 6)), min_size=1, max_size=10),
    )
    def test_matches_upward_ray(self, poly, probes):
        xy = np.array(poly)
        n = len(poly)
        edges = [(i, (i + 1) % n) for i in range(n)]
        probes = np.array(probes)
        # keep probes clear of the polygon so both rays count the same crossings
        p, q = xy[[a for a, _ in edges]], xy[[b for _, b in edges]]
        for pt in probes:
            d = q - p
            s = np.clip(((pt - p) * d).sum(1) / np.maximum((d * d).sum(1), 1e-12), 0, 1)
            if np.min(np.hypot(*(p + s[:, None] * d - pt).T)) < 1e-3:
                return
            if np.min(np.abs(xy[:, 0] - pt[0])) < 1e-6 or np.min(np.abs(xy[:, 1] - pt[1])) < 1e-6:
                return
        got = winding_parity(xy, edges, probes)
        want = [upward_ray_parity(xy, edges, pt) for pt in probes]
        assert got.tolist() == want

    def test_empty_loop(self):
        assert winding_parity(np.zeros((0, 2)), [], np.array([[0.0, 0.0]])).tolist() == [0]


class TestLoopImage:
    def test_static_ring(self):
        li = loop_image(ring_scene(), 0.2, 0.8, LOOP)
        assert li.certified and li.source == li.image and len(li.source) == 1

    def test_filled(self):
        li = loop_image(filling_scene(), 0.0, 1.0, LOOP)
        assert li.certified and len(li.source) == 1 and li.image == ()


class TestReport:
    def test_self_comparison(self):
        sc = filling_scene()
        rep = full_report(sc, sc, dt=1 / 32, h=1 / 8)
        assert rep.conclusions == (IDENTICAL,)
        assert rep.evasion["a"] == rep.evasion["b"]

    def test_unrelated_scenes(self):
        rng = random.Random(5)
        a = static_scene([(rng.uniform(1, 5), rng.uniform(1, 5)) for _ in range(6)])
        b = static_scene([(rng.uniform(1, 5), rng.uniform(1, 5)) for _ in range(6)])
        rep = full_report(a, b, dt=1 / 16, h=1 / 8)
        assert rep.conclusions[0] == DIFFERENT
        assert OBSTRUCTION not in rep.conclusions
        if rep.evasion["a"] == rep.evasion["b"]:
            assert NOT_HOMOTOPY_EQUIVALENT not in rep.conclusions

    def test_json_schema(self):
        sc = filling_scene()
        sc = Scene(sc.domain, 1.0, (), sc.mobile, "", {"fiber_pair": [0.0, 1.0], "loop": [list(e) for e in LOOP]})
        doc = json.loads(json.dumps(full_report(sc, sc, dt=1 / 8, h=1 / 8).to_json()))
        assert set(doc) == {"timeline", "pairs", "evasion", "conclusions"}
        assert set(doc["timeline"][0]) == {"t", "isomorphic"}
        assert {"t", "t2", "beta1_t", "beta1_t2", "rank_incl", "monotone", "scene", "loop"} <= set(doc["pairs"][0])
        assert set(doc["evasion"]) == {"a", "b"}
        assert len(doc["timeline"]) == len(sample_times(1 / 8))
