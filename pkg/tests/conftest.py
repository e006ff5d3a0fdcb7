"""Shared, expensive fixtures computed once per session."""

import pytest

from spec2d import momentum_rep as mr
from spec2d import slab_limit as sl

ETA = -0.5
SLAB_A = [0.4, 0.2, 0.1, 0.05, 1e-4]

# criterion number -> one-line verdict, filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])


@pytest.fixture(scope="session")
def report_z1():
    return mr.transform_report(1.0)


@pytest.fixture(scope="session")
def slab_study():
    return sl.convergence_study(ETA, SLAB_A, grid=sl.RadialGrid(0.005, 20.0), n_modes=4)
