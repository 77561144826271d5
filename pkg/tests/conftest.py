import time

import numpy as np
import pytest

from aprioristep import BandedProblem, ControllerConfig, GridVector, TriDiagSystem, paper_problem, run


def constant_problem(a_diag, f_values, u0, T=1.0, h=1.0, off=0.0):
    """Time-independent banded problem; ``off`` fills both off-diagonals."""
    n = len(a_diag)
    op = TriDiagSystem(np.full(n - 1, off), a_diag, np.full(n - 1, off))
    f = GridVector(f_values, h)
    return BandedProblem(lambda t: op, lambda t: f, GridVector(u0, h), T, nodes=np.arange(1, n + 1) * h)


@pytest.fixture
def rng():
    return np.random.default_rng(20131016)


@pytest.fixture(scope="session")
def paper_runs():
    """Histories of the three benchmark cases at delta = 0.1, gamma = 1.5, tau0 = tau1 = 1e-6."""
    cfg = ControllerConfig(delta=0.1, gamma=1.5, tau0=1e-6, tau1=1e-6)
    return {case: run(paper_problem(case, 100), cfg, 0.5) for case in ("sine", "hat", "const")}


@pytest.fixture(scope="session")
def sine_sweep():
    """Sine-case histories for delta = 0.1, 0.01, 0.001 and the 1e-4 reference."""
    problem = paper_problem("sine", 100)
    return {d: run(problem, ControllerConfig(delta=d), 0.5) for d in (0.1, 0.01, 0.001, 0.0001)}


SUITE_BUDGET_S = 30.0
_suite_start = {}


def pytest_sessionstart(session):
    _suite_start["t"] = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _suite_start["t"]
    _suite_start["elapsed"] = elapsed
    # the budget applies to the whole suite only, not to selections
    if elapsed >= SUITE_BUDGET_S and not session.config.option.keyword and exitstatus == 0:
        session.exitstatus = pytest.ExitCode.TESTS_FAILED


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if "elapsed" not in _suite_start:
        return
    elapsed = _suite_start["elapsed"]
    ok = elapsed < SUITE_BUDGET_S
    terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] C9b full suite runtime < 30 s: {elapsed:.1f} s")
