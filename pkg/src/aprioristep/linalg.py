"""Grid functions on interior nodes and a direct tridiagonal solver.

Grid vectors carry the mesh width ``h`` so that the inner product is the
h-weighted sum over interior nodes, the discrete analogue of the L2 product.
Boundary values are never stored; they are identically zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

PIVOT_RTOL = 1e-14


class DimensionError(ValueError):
    """Raised when grid vectors or systems of incompatible shape are combined."""


class SingularSystemError(ArithmeticError):
    """Raised when Thomas elimination hits a vanishing pivot."""

    def __init__(self, index: int, pivot: float):
        super().__init__(f"zero pivot {pivot!r} at row {index} during tridiagonal elimination")
        self.index = index
        self.pivot = pivot


class NonFiniteError(ArithmeticError):
    """Raised when a solve produces NaN or Inf."""


class GridVector:
    """Values of a grid function on interior nodes, with mesh width ``h``."""

    __slots__ = ("values", "h")

    def __init__(self, values, h: float):
        arr = np.array(values, dtype=np.float64).reshape(-1)
        if arr.size == 0:
            raise DimensionError("grid vector must have at least one node")
        if not np.isfinite(arr).all():
            raise ValueError("grid vector contains non-finite values")
        h = float(h)
        if not h > 0.0 or not math.isfinite(h):
            raise ValueError(f"mesh width must be positive, got {h!r}")
        arr.flags.writeable = False
        self.values = arr
        self.h = h

    @classmethod
    def _wrap(cls, arr: np.ndarray, h: float) -> GridVector:
        # unchecked fast path for results of arithmetic on valid vectors;
        # overflow there surfaces as a non-finite norm
        obj = cls.__new__(cls)
        arr.flags.writeable = False
        obj.values = arr
        obj.h = h
        return obj

    @classmethod
    def zeros(cls, n: int, h: float) -> GridVector:
        return cls(np.zeros(n), h)

    @classmethod
    def full(cls, n: int, value: float, h: float) -> GridVector:
        return cls(np.full(n, float(value)), h)

    def __len__(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return f"GridVector(n={len(self)}, h={self.h!r})"

    def check_compatible(self, other: GridVector) -> None:
        if not isinstance(other, GridVector):
            raise TypeError(f"expected GridVector, got {type(other).__name__}")
        if self.values.size != other.values.size:
            raise DimensionError(f"length mismatch: {self.values.size} vs {other.values.size}")
        if self.h != other.h:
            raise DimensionError(f"mesh width mismatch: {self.h!r} vs {other.h!r}")

    def __add__(self, other: GridVector) -> GridVector:
        self.check_compatible(other)
        return GridVector._wrap(self.values + other.values, self.h)

    def __sub__(self, other: GridVector) -> GridVector:
        self.check_compatible(other)
        return GridVector._wrap(self.values - other.values, self.h)

    def __neg__(self) -> GridVector:
        return GridVector._wrap(-self.values, self.h)

    def __mul__(self, c: float) -> GridVector:
        if isinstance(c, GridVector):
            return NotImplemented
        return GridVector._wrap(float(c) * self.values, self.h)

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> GridVector:
        return GridVector._wrap(self.values / float(c), self.h)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def inner_product(u: GridVector, v: GridVector) -> float:
    """Return sum over interior nodes of u(x) v(x) h."""
    u.check_compatible(v)
    return float(np.dot(u.values, v.values)) * u.h


def norm(u: GridVector) -> float:
    return math.sqrt(inner_product(u, u))


@dataclass(frozen=True)
class TriDiagSystem:
    """Square tridiagonal matrix stored as three bands.

    ``lower[i]`` couples row ``i + 1`` to column ``i``; ``upper[i]`` couples
    row ``i`` to column ``i + 1``.
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        bands = []
        for name in ("lower", "diag", "upper"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).reshape(-1)
            if not math.isfinite(arr.sum()) and not np.isfinite(arr).all():
                raise ValueError(f"{name} band contains non-finite values")
            object.__setattr__(self, name, arr)
            bands.append(arr)
        lower, diag, upper = bands
        n = diag.size
        if n < 1:
            raise DimensionError("tridiagonal system must have size >= 1")
        if lower.size != n - 1 or upper.size != n - 1:
            raise DimensionError(
                f"band lengths ({lower.size}, {n}, {upper.size}) do not form a square system"
            )

    @classmethod
    def _trusted(cls, lower: np.ndarray, diag: np.ndarray, upper: np.ndarray) -> TriDiagSystem:
        # skips validation; callers guarantee finite float64 bands of matching size
        obj = cls.__new__(cls)
        object.__setattr__(obj, "lower", lower)
        object.__setattr__(obj, "diag", diag)
        object.__setattr__(obj, "upper", upper)
        return obj

    @classmethod
    def identity(cls, n: int) -> TriDiagSystem:
        return cls(np.zeros(n - 1), np.ones(n), np.zeros(n - 1))

    @property
    def size(self) -> int:
        return self.diag.size

    def scaled_shift(self, tau: float) -> TriDiagSystem:
        """Return I + tau * self."""
        return TriDiagSystem(tau * self.lower, 1.0 + tau * self.diag, tau * self.upper)

    def matvec(self, x: GridVector) -> GridVector:
        if len(x) != self.size:
            raise DimensionError(f"system of size {self.size} applied to vector of length {len(x)}")
        v = x.values
        out = self.diag * v
        out[:-1] += self.upper * v[1:]
        out[1:] += self.lower * v[:-1]
        return GridVector._wrap(out, x.h)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.upper, 1) + np.diag(self.lower, -1)


@njit(cache=True)
def _thomas(lower, diag, upper, rhs, rtol):
    n = diag.size
    c = np.empty(n)
    d = np.empty(n)
    tol = rtol * np.max(np.abs(diag))
    if tol == 0.0:
        return d, 0, 0.0
    pivot = diag[0]
    if abs(pivot) < tol:
        return d, 0, pivot
    c[0] = upper[0] / pivot if n > 1 else 0.0
    d[0] = rhs[0] / pivot
    for i in range(1, n):
        pivot = diag[i] - lower[i - 1] * c[i - 1]
        if abs(pivot) < tol:
            return d, i, pivot
        if i < n - 1:
            c[i] = upper[i] / pivot
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / pivot
    for i in range(n - 2, -1, -1):
        d[i] -= c[i] * d[i + 1]
    for i in range(n):
        if not np.isfinite(d[i]):
            return d, -2, d[i]
    return d, -1, 0.0


def solve_tridiag(system: TriDiagSystem, rhs: GridVector) -> GridVector:
    """Solve ``system @ x = rhs`` by forward elimination and back substitution.

    No pivoting is performed; the systems arising from ``I + tau*A`` with
    ``A >= 0`` are diagonally dominant. A pivot smaller than
    ``1e-14 * max|diag|`` raises :class:`SingularSystemError`.
    """
    if len(rhs) != system.size:
        raise DimensionError(f"system of size {system.size} with right-hand side of length {len(rhs)}")
    x, bad, pivot = _thomas(system.lower, system.diag, system.upper, rhs.values, PIVOT_RTOL)
    if bad == -2:
        raise NonFiniteError("tridiagonal solve produced non-finite values")
    if bad >= 0:
        raise SingularSystemError(int(bad), float(pivot))
    return GridVector._wrap(x, rhs.h)
