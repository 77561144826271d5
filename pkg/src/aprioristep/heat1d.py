"""Finite-difference discretisation of u_t - u_xx + p(t) u = f(t) on (0, 1).

Homogeneous Dirichlet data at both ends; unknowns live on the interior nodes
x_i = i h, i = 1..M-1, with h = 1/M. The coefficients of the benchmark
problem (T = 0.1) are provided by :func:`p_test`, :func:`f_test` and the three
initial conditions of :class:`Case`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from .linalg import DimensionError, GridVector, TriDiagSystem

T_FINAL = 0.1


def p_test(t: float) -> float:
    """Reaction coefficient: 100 t up to t = 0.075 (inclusive), zero afterwards."""
    if t <= 0.075:
        return 100.0 * t
    return 0.0


def f_test(t: float) -> float:
    """Source: zero up to t = 0.05 (inclusive), then 10 exp(-(t - 0.05)).

    The second branch is also used for t > 0.1.
    """
    if t <= 0.05:
        return 0.0
    return 10.0 * math.exp(-(t - 0.05))


def sine_ic(x):
    return np.sin(np.pi * np.asarray(x, dtype=float))


def hat_ic(x):
    x = np.asarray(x, dtype=float)
    return np.where(x <= 0.5, 2.0 * x, 1.0 - 2.0 * (x - 0.5))


def constant_ic(x):
    return np.ones_like(np.asarray(x, dtype=float))


class Case(enum.Enum):
    """Initial condition of the benchmark problem."""

    SINE = "sine"
    HAT = "hat"
    CONSTANT = "const"

    @property
    def u0(self) -> Callable:
        return {Case.SINE: sine_ic, Case.HAT: hat_ic, Case.CONSTANT: constant_ic}[self]


def dirichlet_eigenvalue(k: int, h: float) -> float:
    """k-th eigenvalue of the 3-point Dirichlet Laplacian, 4/h^2 sin^2(k pi h / 2)."""
    return 4.0 / h**2 * math.sin(k * math.pi * h / 2.0) ** 2


@njit(cache=True)
def _stencil(v, inv_h2, p):
    n = v.size
    out = np.empty(n)
    for i in range(n):
        acc = (2.0 * inv_h2 + p) * v[i]
        if i > 0:
            acc -= inv_h2 * v[i - 1]
        if i < n - 1:
            acc -= inv_h2 * v[i + 1]
        out[i] = acc
    return out


def _coefficient(func, t: float) -> float:
    value = float(func(t))
    if not math.isfinite(value):
        raise ValueError(f"coefficient {getattr(func, '__name__', func)!r} is not finite at t={t!r}")
    return value


@dataclass(frozen=True)
class Heat1DProblem:
    M: int
    p: Callable[[float], float]
    f: Callable[[float], float]
    u0: Callable
    T: float = T_FINAL

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2:
            raise ValueError(f"need at least two mesh cells, got M={self.M!r}")
        if not self.T > 0:
            raise ValueError(f"horizon must be positive, got T={self.T!r}")

    @property
    def h(self) -> float:
        return 1.0 / self.M

    @property
    def n(self) -> int:
        return self.M - 1

    def nodes(self) -> np.ndarray:
        return np.arange(1, self.M) * self.h

    def node_index(self, x: float) -> int:
        i = round(x * self.M)
        if not 1 <= i <= self.M - 1 or abs(i * self.h - x) > 1e-12:
            raise ValueError(f"probe location {x!r} is not an interior grid node for M={self.M}")
        return i - 1

    def apply_A(self, t: float, u: GridVector) -> GridVector:
        if len(u) != self.n or u.h != self.h:
            raise DimensionError(f"expected {self.n} interior values with h={self.h!r}")
        out = _stencil(u.values, 1.0 / self.h**2, _coefficient(self.p, t))
        return GridVector._wrap(out, self.h)

    def operator(self, t: float) -> TriDiagSystem:
        """Matrix of A(t)."""
        off = np.full(self.n - 1, -1.0 / self.h**2)
        return TriDiagSystem(off, np.full(self.n, 2.0 / self.h**2 + self.p(t)), off)

    def implicit_system(self, t: float, tau: float) -> TriDiagSystem:
        """Matrix of I + tau A(t)."""
        if not (tau > 0 and math.isfinite(tau)):
            raise ValueError(f"step must be positive and finite, got {tau!r}")
        off = np.full(self.n - 1, -tau / self.h**2)
        diag = np.full(self.n, 1.0 + tau * (2.0 / self.h**2 + _coefficient(self.p, t)))
        return TriDiagSystem._trusted(off, diag, off)

    def source(self, t: float) -> GridVector:
        return GridVector._wrap(np.full(self.n, _coefficient(self.f, t)), self.h)

    def initial_state(self) -> GridVector:
        return GridVector(self.u0(self.nodes()), self.h)

    def horizon(self) -> float:
        return self.T

    def min_reaction(self, t_max: float, samples: int = 1001) -> float:
        """Smallest sampled p(t) on (0, t_max]; must be >= 0 for A(t) >= 0."""
        ts = np.linspace(t_max / samples, t_max, samples)
        return min(self.p(float(t)) for t in ts)


def paper_problem(case: Case | str, M: int = 100, T: float = T_FINAL) -> Heat1DProblem:
    """Benchmark problem with discontinuous p(t), f(t) and the chosen initial condition."""
    case = Case(case)
    return Heat1DProblem(M=M, p=p_test, f=f_test, u0=case.u0, T=T)
