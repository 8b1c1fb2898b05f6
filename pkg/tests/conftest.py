import sys

import pytest

from polygas.models import HF_CONSTANTS, PhysicalConstants, inertia_from_rotational_constant


@pytest.fixture(scope="session")
def si():
    return PhysicalConstants()


@pytest.fixture(scope="session")
def reduced():
    return PhysicalConstants.reduced()


@pytest.fixture(scope="session")
def hf_inertia(si):
    return inertia_from_rotational_constant(HF_CONSTANTS.B_over_hc, si)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
