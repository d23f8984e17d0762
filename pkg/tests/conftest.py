import math

import pytest

from fbgcavity.cavity_response import CavitySpec, tune_length
from fbgcavity.emission_rates import AtomSpec, rates
from fbgcavity.fiber_modes import FiberSpec, solve_fundamental

# lines collected by the acceptance suite, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fiber():
    return FiberSpec(a=200.0, n1=1.45, n2=1.0)


@pytest.fixture(scope="session")
def mode(fiber):
    return solve_fundamental(fiber, 852.0)


@pytest.fixture(scope="session")
def atom():
    return AtomSpec(r=200.0, z=0.0, q=1, lambda0=852.0)


@pytest.fixture(scope="session")
def free_rates(fiber, mode, atom):
    return rates(fiber, atom, mode)


@pytest.fixture(scope="session")
def tuned():
    """Cavity at resonance of the requested parity for a q = +1 dipole."""
    def make(mode, L, R2=0.9, parity="even", q=1, alpha=0.0):
        cav = CavitySpec(L=L, R_mag=math.sqrt(R2), alpha=alpha)
        return CavitySpec(L=tune_length(cav, mode, q, parity), R_mag=cav.R_mag, alpha=alpha)
    return make
