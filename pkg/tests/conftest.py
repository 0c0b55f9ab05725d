import time

import pytest

from fbwaves.bvp import continuation
from fbwaves.model import ModelSpec
from fbwaves.phase_plane import Regularisation

# speed of the singular wave for the reference model, frozen from find_speed
C0_REF = 0.19681082810244993


@pytest.fixture(scope="session")
def ref_model():
    return ModelSpec.from_roots(6.0, 7.0 / 12.0, 0.75, 5.0, 0.2)


@pytest.fixture(scope="session")
def ref_ladder(ref_model):
    """Non-local continuation down to eps=1e-5, plus its wall time."""
    t = time.perf_counter()
    sols = continuation(ref_model, C0_REF, (1e-3, 1e-4, 1e-5), Regularisation.NONLOCAL)
    return sols, time.perf_counter() - t


@pytest.fixture(scope="session")
def viscous_ladder(ref_model):
    sols = continuation(ref_model, 0.19936220453664433, (1e-3, 1e-4), Regularisation.VISCOUS_POSITIVE)
    return sols


ACCEPTANCE = []


class Verdict:
    def __init__(self, number, title):
        self.number, self.title, self.line = number, title, None

    def __call__(self, ok, detail):
        self.line = f"criterion {self.number:>2} {'PASS' if ok else 'FAIL'}  {self.title}: {detail}"
        print(self.line)
        ACCEPTANCE.append(self.line)
        assert ok, detail


@pytest.fixture
def verdict(request):
    marker = request.node.get_closest_marker("criterion")
    v = Verdict(*marker.args)
    yield v
    if v.line is None:
        line = f"criterion {v.number:>2} FAIL  {v.title}: raised before a verdict"
        print(line)
        ACCEPTANCE.append(line)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
