import io
import json
import re
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from scenegen import static_scene
from sensornet import scenes
from sensornet.cli import run
from sensornet.complex import SimplicialComplex
from sensornet.geom import Point, Rectangle, Scene

RING = [(3 + 1.8 * np.cos(a), 3 + 1.8 * np.sin(a)) for a in np.linspace(0, 2 * np.pi, 10, endpoint=False)]


def call(*argv):
    out = io.StringIO()
    code = run([str(a) for a in argv], out)
    return code, out.getvalue()


@pytest.fixture
def ring_file(tmp_path):
    p = tmp_path / "ring.json"
    scenes.save(static_scene(RING), p)
    return p


@pytest.fixture
def covered_file(tmp_path):
    pts = [(x, y) for x in np.arange(0.6, 6, 1.2) for y in np.arange(0.6, 6, 1.2)]
    p = tmp_path / "covered.json"
    scenes.save(static_scene(pts), p)
    return p


class TestExitCodes:
    def test_no_command(self):
        assert call()[0] == 64

    def test_unknown_command(self):
        assert call("frobnicate")[0] == 64

    def test_time_out_of_range(self, ring_file):
        assert call("coverage", ring_file, "--time", "1.5")[0] == 64

    def test_grid_too_coarse(self, ring_file):
        assert call("coverage", ring_file, "--time", "0", "--grid", "0.5")[0] == 64

    def test_missing_file(self, tmp_path):
        assert call("evasion", tmp_path / "nope.json")[0] == 66

    def test_malformed_file(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{ not json")
        assert call("cech", p, "--time", "0")[0] == 66

    def test_invalid_scene(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"format_version": 1, "radius": -1, "domain": {"kind": "rectangle", "min": [0, 0], "max": [1, 1]}}))
        assert call("cech", p, "--time", "0")[0] == 66


class TestCoverage:
    def test_hole(self, ring_file):
        code, out = call("coverage", ring_file, "--time", "0")
        assert code == 1
        assert re.match(r"homology: hole beta1=\d+ fence=ok\ngrid: hole witness=[-\d.]+,[-\d.]+\n", out)

    def test_covered(self, covered_file):
        code, out = call("coverage", covered_file, "--time", "0.5", "--grid", "0.0625")
        assert code == 0
        assert out == "homology: covered beta1=0 fence=ok\ngrid: covered\n"

    def test_fence_failure(self, tmp_path):
        p = tmp_path / "bare.json"
        scenes.save(static_scene([(3, 3)], fence=False), p)
        code, out = call("coverage", p, "--time", "0")
        assert code == 2 and "fence=failed" in out


class TestEvasion:
    def test_witness_file(self, ring_file, tmp_path):
        w = tmp_path / "w.txt"
        code, out = call("evasion", ring_file, "--dt", "0.0625", "--witness", w)
        assert code == 0 and out == "evasion: exists\n"
        lines = w.read_text().splitlines()
        assert len(lines) == 17
        assert all(re.fullmatch(r"\d\.\d{6} -?\d+\.\d{6} -?\d+\.\d{6}", ln) for ln in lines)

    def test_none(self, covered_file):
        assert call("evasion", covered_file, "--dt", "0.125", "--grid", "0.0625") == (1, "evasion: none\n")


class TestCech:
    def test_complex_at_time(self, ring_file):
        code, out = call("cech", ring_file, "--time", "0.3")
        assert code == 0
        K = SimplicialComplex.parse(out)
        assert len(K.vertices) == 30

    def test_table(self, tmp_path):
        from sensornet.geom import Trajectory

        sc = Scene(
            Rectangle(Point(0, 0), Point(10, 10)),
            1.0,
            (),
            [Trajectory.static((3, 5)), Trajectory(((0, (4, 5)), (1, (6, 5))))],
        )
        p = tmp_path / "pair.json"
        scenes.save(sc, p)
        code, out = call("cech", p)
        lines = out.splitlines()
        assert code == 0 and lines[0].startswith("# start end")
        assert lines[1].split()[2:] == ["2", "1", "0", "1", "0"]
        assert lines[2].split()[2:] == ["2", "0", "0", "2", "0"]
        assert abs(float(lines[1].split()[1]) - 0.5) < 1e-6


class TestScene:
    def test_gen(self, tmp_path, scene_b):
        p = tmp_path / "b.json"
        code, _ = call("scene", "gen", "B", "--out", p)
        assert code == 0 and scenes.load(p) == scene_b

    def test_gen_needs_out(self):
        assert call("scene", "gen", "A")[0] == 64


class TestSnapshot:
    def test_layers(self, ring_file, tmp_path):
        p = tmp_path / "s.svg"
        assert call("snapshot", ring_file, "--time", "0.5", "--out", p)[0] == 0
        root = ET.parse(p).getroot()
        ids = [g.get("id") for g in root.iter("{http://www.w3.org/2000/svg}g")]
        assert ids == ["uncovered", "disks", "triangles", "edges", "sensors"]

    def test_empty_scene(self, tmp_path):
        src, out = tmp_path / "e.json", tmp_path / "e.svg"
        scenes.save(Scene(Rectangle(Point(0, 0), Point(4, 3)), 1.0), src)
        assert call("snapshot", src, "--time", "0", "--out", out)[0] == 0
        root = ET.parse(out).getroot()
        shapes = [el.tag.split("}")[1] for el in root if not el.tag.endswith("title")]
        assert shapes == ["rect"]


def test_module_entry_point(ring_file):
    proc = subprocess.run(
        [sys.executable, "-m", "sensornet", "coverage", str(ring_file), "--time", "0"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1 and proc.stdout.startswith("homology: hole")
