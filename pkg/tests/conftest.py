import numpy as np
import pytest

from spdwg.mesh import Mesh

UNIT_TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def single_element(vertices):
    vertices = np.asarray(vertices, dtype=float)
    return Mesh.from_elements(vertices, [list(range(len(vertices)))])


def random_triangle(rng):
    while True:
        v = rng.uniform(-1.0, 1.0, size=(3, 2))
        d1, d2 = v[1] - v[0], v[2] - v[0]
        area = 0.5 * (d1[0] * d2[1] - d1[1] * d2[0])
        if abs(area) > 0.1:
            return v if area > 0 else v[[0, 2, 1]]


def random_rectangle(rng):
    w, h = rng.uniform(0.3, 1.5, size=2)
    theta = rng.uniform(0, 2 * np.pi)
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    box = np.array([[0, 0], [w, 0], [w, h], [0, h]])
    return box @ rot.T + rng.uniform(-1, 1, size=2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def unit_triangle():
    return single_element(UNIT_TRIANGLE)


@pytest.fixture
def unit_square():
    return single_element(UNIT_SQUARE)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("tests.test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        ok, detail = verdicts[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {detail}")
