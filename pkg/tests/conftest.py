import numpy as np
import pytest

from minkdiff import charts
from minkdiff.norm import Norm


@pytest.fixture(scope="session")
def norms():
    return {"euclidean": Norm.euclidean(), "ellipsoid": Norm.ellipsoid(2, 1, 1),
            "blend3": Norm.blend(0.3), "blend6": Norm.blend(0.6)}


@pytest.fixture(scope="session")
def chart_zoo():
    return {"sphere": charts.sphere(1.0), "ellipsoid": charts.ellipsoid(1.5, 1.0, 0.7),
            "torus": charts.torus(2.0, 0.5), "helicoid": charts.helicoid(1.0),
            "saddle": charts.graph({"20": 1.0, "02": -2.0}),
            "bowl": charts.graph({"20": 1.0, "02": 0.5}), "cylinder": charts.cylinder(1.0),
            "plane": charts.plane()}


def grid_points(chart, n=5):
    margin = 0.05 if chart.direction_map is not None else 0.0
    U, V = chart.sample_grid(n, n, margin=margin)
    return np.stack([U.ravel(), V.ravel()], axis=-1)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
