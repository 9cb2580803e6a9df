import numpy as np
import pytest

from wigner_drift._accel import HAVE_NUMBA
from wigner_drift.evolution import circular_packet, run_simulation
from wigner_drift.kinematics import CircularOrbit

FIG2_R = 1.0 / 0.9
FIG2_V = 0.8
FIG2_W = 0.1

BACKENDS = ["numpy"] + (["numba"] if HAVE_NUMBA else [])


@pytest.fixture(scope="session")
def fig2_orbit():
    return CircularOrbit(FIG2_R, FIG2_V)


@pytest.fixture(scope="session")
def fig2_result(fig2_orbit):
    return run_simulation(fig2_orbit, circular_packet(fig2_orbit, FIG2_W))


@pytest.fixture
def rng():
    return np.random.default_rng(20031)


ACCEPTANCE_LINES = []


def report(criterion: str, ok: bool, detail: str):
    """Record one acceptance line; printed again in the terminal summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
