from __future__ import annotations

import pytest

from sensornet import scenes

CRITERIA = {
    1: "A/B evasion split",
    2: "combinatorial identity of nerves",
    3: "H1 homeomorphism obstruction",
    4: "uncovered-region inequivalence from verdicts only",
    5: "nerve lemma against raster Betti numbers",
    6: "homological coverage against grid oracle",
    7: "homology kernel properties",
    8: "CLI determinism",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion exercised by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    rep = (yield).get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes.setdefault(marker.args[0], []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, name in CRITERIA.items():
        runs = _outcomes.get(n)
        if runs is None:
            tr.write_line(f"CRITERION {n}: NOT RUN ({name})")
        else:
            verdict = "PASS" if all(runs) else "FAIL"
            tr.write_line(f"CRITERION {n}: {verdict} ({name}; {sum(runs)}/{len(runs)} checks)")


@pytest.fixture(scope="session")
def scene_a():
    return scenes.build_example_A()


@pytest.fixture(scope="session")
def scene_b():
    return scenes.build_example_B()


@pytest.fixture(scope="session")
def scene_files(tmp_path_factory, scene_a, scene_b):
    d = tmp_path_factory.mktemp("scenes")
    pa, pb = d / "a.json", d / "b.json"
    scenes.save(scene_a, pa)
    scenes.save(scene_b, pb)
    return pa, pb


@pytest.fixture(scope="session")
def timeline_a(scene_a):
    from sensornet.cech import build_timeline

    return build_timeline(scene_a)
