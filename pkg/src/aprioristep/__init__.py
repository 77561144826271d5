"""Backward Euler with a-priori time-step selection for linear parabolic problems."""

from .controller import (
    ControllerConfig,
    StepDiagnostics,
    Variant,
    correcting_terms,
    forward_backward_gap,
    propose_step,
    step_doubling_gap,
)
from .heat1d import Heat1DProblem, Case, f_test, p_test, paper_problem
from .linalg import (
    DimensionError,
    GridVector,
    NonFiniteError,
    SingularSystemError,
    TriDiagSystem,
    inner_product,
    norm,
    solve_tridiag,
)
from .problem import BandedProblem, EvolutionProblem, residual
from .stepper import (
    DivergenceError,
    RunHistory,
    StabilityError,
    StepRecord,
    implicit_step,
    run,
    run_uniform,
)

__all__ = [
    "BandedProblem",
    "Case",
    "ControllerConfig",
    "DimensionError",
    "DivergenceError",
    "EvolutionProblem",
    "GridVector",
    "Heat1DProblem",
    "NonFiniteError",
    "RunHistory",
    "SingularSystemError",
    "StabilityError",
    "StepDiagnostics",
    "StepRecord",
    "TriDiagSystem",
    "Variant",
    "correcting_terms",
    "f_test",
    "forward_backward_gap",
    "implicit_step",
    "inner_product",
    "norm",
    "p_test",
    "propose_step",
    "residual",
    "run",
    "run_uniform",
    "solve_tridiag",
    "step_doubling_gap",
    "paper_problem",
]

__version__ = "0.1.0"
