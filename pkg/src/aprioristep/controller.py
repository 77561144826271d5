"""A-priori step selection for the fully implicit scheme.

The next step is chosen before it is taken, from the two most recent levels
y_n, y_{n-1}:

    s1 = ||(A(t~) - A(t_n)) y_n|| / gamma
    s2 = ||f(t~) - f(t_n)|| / gamma
    s3 = ||A(t~) (y_n - y_{n-1})||
    gamma_corr = delta / (s1 + s2 + s3)
    tau_{n+1} = max(tau0, min(gamma, gamma_corr) * tau_n)

with the look-ahead time t~ = t_n + gamma * tau_n. The step-doubling variant
uses 4 * gamma_corr instead. Growth is capped by ``gamma``; ``tau0`` is a
floor. Coefficients at t~ are evaluated even when t~ lies beyond the horizon.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .linalg import GridVector, norm
from .problem import EvolutionProblem


class Variant(enum.Enum):
    FORWARD_BACKWARD = "fb"
    STEP_DOUBLING = "doubling"


@dataclass(frozen=True)
class ControllerConfig:
    """Parameters of the step law.

    delta is the admissible error level per unit time, gamma the maximal
    growth factor between consecutive steps, tau0 the minimal step and tau1
    the step used for the first level.
    """

    delta: float = 0.1
    gamma: float = 1.5
    tau0: float = 1e-6
    tau1: float = 1e-6
    variant: Variant = Variant.FORWARD_BACKWARD

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        for name in ("delta", "gamma", "tau0", "tau1"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta!r}")
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma!r}")
        if not self.tau0 > 0:
            raise ValueError(f"tau0 must be positive, got {self.tau0!r}")
        if not self.tau1 >= self.tau0:
            raise ValueError(f"tau1 must be at least tau0, got tau1={self.tau1!r} < tau0={self.tau0!r}")


@dataclass(frozen=True)
class StepDiagnostics:
    s1: float
    s2: float
    s3: float
    gamma_corr: float
    tau_next: float


def correcting_terms(
    problem: EvolutionProblem,
    t_n: float,
    tau_n: float,
    y_n: GridVector,
    y_prev: GridVector,
    cfg: ControllerConfig,
) -> tuple[float, float, float]:
    """Return the operator, source and solution terms (s1, s2, s3) at level n."""
    if not tau_n > 0:
        raise ValueError(f"previous step must be positive, got {tau_n!r}")
    y_n.check_compatible(y_prev)
    g = cfg.gamma
    t_ahead = t_n + g * tau_n
    A_ahead_y = problem.apply_A(t_ahead, y_n)
    A_now_y = problem.apply_A(t_n, y_n)
    s1 = norm(A_ahead_y - A_now_y) / g
    s2 = norm(problem.source(t_ahead) - problem.source(t_n)) / g
    s3 = norm(problem.apply_A(t_ahead, y_n - y_prev))
    return s1, s2, s3


def propose_step(s1: float, s2: float, s3: float, tau_n: float, cfg: ControllerConfig) -> StepDiagnostics:
    """Next step from the correcting terms; D = 0 leaves only the growth cap."""
    if not tau_n >= cfg.tau0:
        raise ValueError(f"previous step {tau_n!r} is below the floor tau0={cfg.tau0!r}")
    total = s1 + s2 + s3
    gamma_corr = cfg.delta / total if total > 0 else math.inf
    if cfg.variant is Variant.STEP_DOUBLING:
        gamma_corr *= 4.0
    tau_next = max(cfg.tau0, min(cfg.gamma, gamma_corr) * tau_n)
    return StepDiagnostics(s1, s2, s3, gamma_corr, tau_next)


def forward_backward_gap(
    problem: EvolutionProblem, t_n: float, t_next: float, tau: float, y_n: GridVector
) -> GridVector:
    """v_n - y_n after an explicit step forward and an implicit-form step back.

    The forward step v_{n+1} = y_n - tau (A(t_n) y_n - f(t_n)) is followed by
    v_n = v_{n+1} + tau (A(t_next) v_{n+1} - f(t_next)), both explicit.
    """
    if not tau > 0:
        raise ValueError(f"step must be positive, got {tau!r}")
    v_next = y_n - tau * (problem.apply_A(t_n, y_n) - problem.source(t_n))
    v_back = v_next + tau * (problem.apply_A(t_next, v_next) - problem.source(t_next))
    return v_back - y_n


def step_doubling_gap(problem: EvolutionProblem, t_n: float, tau: float, y_n: GridVector) -> GridVector:
    """v_{n+1} - w_{n+1}: one explicit step of size tau against two of size tau/2."""
    if not tau > 0:
        raise ValueError(f"step must be positive, got {tau!r}")
    v = y_n - tau * (problem.apply_A(t_n, y_n) - problem.source(t_n))
    half = 0.5 * tau
    t_half = t_n + half
    w_half = y_n - half * (problem.apply_A(t_n, y_n) - problem.source(t_n))
    w = w_half - half * (problem.apply_A(t_half, w_half) - problem.source(t_half))
    return v - w
