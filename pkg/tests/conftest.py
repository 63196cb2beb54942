import numpy as np
import pytest

from stskdm import cda_dm_set, co_fixture_bpsk8, expand, fec_dm_set, make_psk
from stskdm.dispersion import CdaParams, FecParams


@pytest.fixture(scope="session")
def qpsk():
    return make_psk(4)


@pytest.fixture(scope="session")
def bpsk():
    return make_psk(2)


@pytest.fixture(scope="session")
def fec_cb(qpsk):
    # x^2 - j over QPSK, second coefficient pinned
    return expand(qpsk, fec_dm_set(qpsk, FecParams(M=2, pivot=1)))


@pytest.fixture(scope="session")
def cda_cb(bpsk):
    # t = exp(j pi/2), delta = exp(j 3pi/8)
    return expand(bpsk, cda_dm_set(bpsk, CdaParams(M=2, t_phase=0.5, delta_phase=3 / 8)))


@pytest.fixture(scope="session")
def co8_cb(bpsk):
    return expand(bpsk, co_fixture_bpsk8())



# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
