"""Contract for linear evolution problems ``du/dt + A(t) u = f(t)``, ``u(0) = u0``.

The stepper assembles ``I + tau*A(t)`` through :meth:`implicit_system`; the
step controller only needs the action of ``A`` at shifted times and uses
:meth:`apply_A`. Times handed to either may run past the horizon, and
implementations evaluate their coefficients by formula there, without clamping.
"""

from __future__ import annotations

from typing import Callable, Protocol, runtime_checkable

from .linalg import GridVector, TriDiagSystem


@runtime_checkable
class EvolutionProblem(Protocol):
    def apply_A(self, t: float, u: GridVector) -> GridVector: ...

    def source(self, t: float) -> GridVector: ...

    def implicit_system(self, t: float, tau: float) -> TriDiagSystem: ...

    def initial_state(self) -> GridVector: ...

    def horizon(self) -> float: ...


def residual(problem: EvolutionProblem, t: float, tau: float, y_new: GridVector, y_old: GridVector) -> GridVector:
    """Defect of the backward Euler relation at time ``t``.

    Returns ``(y_new - y_old)/tau + A(t) y_new - f(t)``.
    """
    if not tau > 0:
        raise ValueError(f"step must be positive, got {tau!r}")
    return (y_new - y_old) / tau + problem.apply_A(t, y_new) - problem.source(t)


class BandedProblem:
    """Evolution problem given by a tridiagonal operator ``A(t)`` and source ``f(t)``.

    Parameters
    ----------
    operator : callable
        ``t -> TriDiagSystem`` holding the matrix of ``A(t)``.
    source : callable
        ``t -> GridVector`` with the values of ``f(t)``.
    u0 : GridVector
        Initial state.
    T : float
        Final time.
    nodes : sequence of float, optional
        Coordinates of the unknowns, used to locate probe points.
    """

    def __init__(
        self,
        operator: Callable[[float], TriDiagSystem],
        source: Callable[[float], GridVector],
        u0: GridVector,
        T: float,
        nodes=None,
    ):
        if not T > 0:
            raise ValueError(f"horizon must be positive, got {T!r}")
        self._operator = operator
        self._source = source
        self._u0 = u0
        self._T = float(T)
        self._nodes = None if nodes is None else [float(x) for x in nodes]

    def apply_A(self, t: float, u: GridVector) -> GridVector:
        return self._operator(t).matvec(u)

    def source(self, t: float) -> GridVector:
        return self._source(t)

    def implicit_system(self, t: float, tau: float) -> TriDiagSystem:
        return self._operator(t).scaled_shift(tau)

    def initial_state(self) -> GridVector:
        return self._u0

    def horizon(self) -> float:
        return self._T

    def node_index(self, x: float) -> int:
        if self._nodes is None:
            raise ValueError("problem has no node coordinates; probes unavailable")
        for i, xi in enumerate(self._nodes):
            if abs(xi - x) <= 1e-12:
                return i
        raise ValueError(f"probe location {x!r} is not a grid node")
