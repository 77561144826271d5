"""Time marching with the fully implicit (backward Euler) scheme.

Each level solves (I + tau A(t_{n+1})) y_{n+1} = y_n + tau f(t_{n+1}). In
adaptive mode the first step is the configured ``tau1`` and every later step
comes from :func:`aprioristep.controller.propose_step`; proposed steps are
always accepted. The step that would overshoot the horizon is cut so the run
lands on T exactly, and that final step is exempt from the ``tau0`` floor.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .controller import ControllerConfig, correcting_terms, propose_step
from .linalg import GridVector, NonFiniteError, norm, solve_tridiag
from .problem import EvolutionProblem

log = logging.getLogger(__name__)

# relative slack on the level-wise stability bound, covers roundoff in the solve
STABILITY_RTOL = 1e-12


class DivergenceError(RuntimeError):
    def __init__(self, step: int, t: float):
        super().__init__(f"non-finite solution at step {step} (t={t!r})")
        self.step = step
        self.t = t


class StabilityError(RuntimeError):
    """The discrete bound ||y_n|| <= ||u0|| + sum tau_k ||f_k|| was violated."""

    def __init__(self, step: int, value: float, bound: float):
        super().__init__(f"stability bound violated at step {step}: ||y||={value!r} > {bound!r}")
        self.step = step
        self.value = value
        self.bound = bound


@dataclass(frozen=True)
class StepRecord:
    """Level n reached with step tau_n.

    s1, s2, s3 and gamma_corr are the diagnostics that produced tau_n; they
    are NaN for the first step and for uniform runs.
    """

    n: int
    t_n: float
    tau_n: float
    s1: float
    s2: float
    s3: float
    gamma_corr: float
    probe_value: float


@dataclass
class RunHistory:
    records: list[StepRecord] = field(default_factory=list)
    probe_x: float | None = None
    initial_probe: float = math.nan
    final_state: GridVector | None = None
    norms: list[float] = field(default_factory=list)
    bounds: list[float] = field(default_factory=list)

    @property
    def total_steps(self) -> int:
        return len(self.records)

    def times(self) -> np.ndarray:
        return np.array([r.t_n for r in self.records])

    def steps(self) -> np.ndarray:
        return np.array([r.tau_n for r in self.records])

    def terms(self) -> np.ndarray:
        """Array of shape (N, 3) with s1, s2, s3 per record."""
        return np.array([(r.s1, r.s2, r.s3) for r in self.records]).reshape(-1, 3)

    def probe_series(self) -> tuple[np.ndarray, np.ndarray]:
        """Probe values including the initial level t = 0."""
        t = np.concatenate([[0.0], self.times()])
        u = np.concatenate([[self.initial_probe], [r.probe_value for r in self.records]])
        return t, u


def implicit_step(problem: EvolutionProblem, t_next: float, tau: float, y_n: GridVector) -> GridVector:
    """One backward Euler step landing at ``t_next``."""
    if not tau > 0:
        raise ValueError(f"step must be positive, got {tau!r}")
    rhs = y_n + tau * problem.source(t_next)
    return solve_tridiag(problem.implicit_system(t_next, tau), rhs)


class _Marcher:
    """Shared bookkeeping for adaptive and uniform runs."""

    def __init__(self, problem: EvolutionProblem, probe_x: float | None, check_stability: bool):
        self.problem = problem
        self.check_stability = check_stability
        self.probe_index = None if probe_x is None else problem.node_index(probe_x)
        self.y = problem.initial_state()
        self.t = 0.0
        self.bound = norm(self.y)
        self.history = RunHistory(probe_x=probe_x, initial_probe=self._probe(self.y))

    def _probe(self, y: GridVector) -> float:
        return math.nan if self.probe_index is None else float(y.values[self.probe_index])

    def advance(self, t_next: float, tau: float, diag=None) -> GridVector:
        n = self.history.total_steps + 1
        try:
            y_next = implicit_step(self.problem, t_next, tau, self.y)
        except NonFiniteError as exc:
            raise DivergenceError(n, t_next) from exc
        size = norm(y_next)
        if not math.isfinite(size):
            raise DivergenceError(n, t_next)
        self.bound += tau * norm(self.problem.source(t_next))
        if self.check_stability and size > self.bound * (1.0 + STABILITY_RTOL):
            raise StabilityError(n, size, self.bound)
        self.history.norms.append(size)
        self.history.bounds.append(self.bound)
        if diag is None:
            s1 = s2 = s3 = gc = math.nan
        else:
            s1, s2, s3, gc = diag.s1, diag.s2, diag.s3, diag.gamma_corr
        self.history.records.append(StepRecord(n, t_next, tau, s1, s2, s3, gc, self._probe(y_next)))
        y_old = self.y
        self.y = y_next
        self.t = t_next
        return y_old


def _landing(t: float, tau: float, T: float) -> tuple[float, float, bool]:
    if t + tau >= T * (1.0 - 1e-14):
        return T, T - t, True
    return t + tau, tau, False


def run(
    problem: EvolutionProblem,
    cfg: ControllerConfig,
    probe_x: float | None = None,
    check_stability: bool = True,
) -> RunHistory:
    """March from 0 to T with a-priori step selection.

    Parameters
    ----------
    problem : EvolutionProblem
        Linear problem with A(t) >= 0.
    cfg : ControllerConfig
        Step-law parameters.
    probe_x : float, optional
        Grid node at which the solution is recorded. Requires
        ``problem.node_index``.
    check_stability : bool
        Verify the discrete stability bound after each step.

    Returns
    -------
    RunHistory
        One record per accepted step; ``history.final_state`` holds y_N.

    Raises
    ------
    DivergenceError
        If the state becomes non-finite.
    StabilityError
        If ``||y_n||`` exceeds ``||u0|| + sum tau_k ||f(t_k)||``.
    """
    T = problem.horizon()
    m = _Marcher(problem, probe_x, check_stability)
    t_next, tau, final = _landing(0.0, cfg.tau1, T)
    y_prev = m.advance(t_next, tau)
    while not final:
        diag = propose_step(*correcting_terms(problem, m.t, tau, m.y, y_prev, cfg), tau, cfg)
        t_next, tau, final = _landing(m.t, diag.tau_next, T)
        y_prev = m.advance(t_next, tau, diag)
    m.history.final_state = m.y
    log.debug("adaptive run finished: %d steps, delta=%g", m.history.total_steps, cfg.delta)
    return m.history


def run_uniform(
    problem: EvolutionProblem,
    tau: float,
    probe_x: float | None = None,
    check_stability: bool = True,
) -> RunHistory:
    """Fixed-step backward Euler; the last step is cut to land on T."""
    if not tau > 0 or not math.isfinite(tau):
        raise ValueError(f"step must be positive, got {tau!r}")
    T = problem.horizon()
    m = _Marcher(problem, probe_x, check_stability)
    final = False
    n = 0
    while not final:
        n += 1
        # multiply rather than accumulate to keep the grid uniform
        t_next, step, final = _landing(m.t, n * tau - m.t, T)
        m.advance(t_next, step)
    m.history.final_state = m.y
    return m.history
