import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from johncut.fixtures import l_shape, notched_rect, rectangle
from johncut.geom import validate_polygon

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def square():
    return validate_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture
def lshape():
    return l_shape()


@pytest.fixture
def rect4():
    return rectangle(4.0, 1.0)


@pytest.fixture
def notch():
    return notched_rect(0.1)


def random_convex_points(rng: np.random.Generator, n: int = 12) -> np.ndarray:
    return rng.uniform(-1, 1, size=(n, 2)) * rng.uniform(0.2, 1.0, size=2)


def rigid(theta: float, shift=(0.0, 0.0)):
    c, s = math.cos(theta), math.sin(theta)
    m = np.array([[c, -s], [s, c]])
    return lambda pts: np.asarray(pts, float) @ m.T + np.asarray(shift, float)


# Expensive end-to-end runs shared between the smooth tests and the acceptance suite.


@pytest.fixture(scope="session")
def disk_partition():
    from johncut.fixtures import circle_ring
    from johncut.smooth import DomainInput, decompose_domain
    return decompose_domain(DomainInput(circle_ring(1.0, 512)), theta=0.5, epsilon=0.01)


@pytest.fixture(scope="session")
def rounded_square_partition():
    from johncut.fixtures import rounded_square_ring
    from johncut.smooth import DomainInput, decompose_domain
    return decompose_domain(DomainInput(rounded_square_ring(1.0, 0.05, spacing=0.005)), theta=0.5)


# One PASS/FAIL line per acceptance criterion, repeated in the terminal summary.

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    def log(number: int, title: str, failures: list[str], detail: str = "") -> None:
        status = "PASS" if not failures else "FAIL"
        line = f"criterion {number:2d} {status}: {title}" + (f" ({detail})" if detail else "")
        if failures:
            line += " | " + "; ".join(failures[:5]) + (f" ... {len(failures)} total" if len(failures) > 5 else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
