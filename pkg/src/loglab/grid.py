"""Uniform 1-D grids and nodal functions with the exterior-zero convention."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import DomainError, GridMismatchError

MIN_NODES = 4


@dataclass(frozen=True)
class Grid1D:
    """Interior nodes ``x_i = a + i h``, ``i = 1..n``, of the interval ``(a, b)``.

    Nodes are cell centres of the partition of ``(a + h/2, b - h/2)`` so every
    quadrature uses the uniform weight ``h``.
    """

    a: float
    b: float
    n: int

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
            raise DomainError(f"need finite a < b, got a={self.a!r}, b={self.b!r}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < MIN_NODES:
            raise DomainError(f"need an integer n >= {MIN_NODES}, got {self.n!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self):
        return (self.b - self.a) / (self.n + 1)

    @property
    def length(self):
        return self.b - self.a

    @cached_property
    def nodes(self):
        x = self.a + self.h * np.arange(1, self.n + 1, dtype=float)
        x.setflags(write=False)
        return x

    def function(self, values):
        return GridFunction(self, values)

    def evaluate(self, f):
        """Sample a callable at the nodes."""
        return GridFunction(self, np.asarray(f(self.nodes), dtype=float))

    def zeros(self):
        return GridFunction(self, np.zeros(self.n))


def build_grid(a, b, n):
    return Grid1D(a, b, n)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nodal values of a function vanishing outside ``(grid.a, grid.b)``."""

    grid: Grid1D
    values: np.ndarray = field(repr=False)

    # numpy scalars defer to the reflected operators below
    __array_ufunc__ = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if v.shape[0] != self.grid.n:
            raise GridMismatchError(
                f"expected {self.grid.n} nodal values, got {v.shape[0]}"
            )
        if not np.all(np.isfinite(v)):
            raise DomainError("nodal values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.grid.n

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def _other(self, other):
        if isinstance(other, GridFunction):
            check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, c):
        return GridFunction(self.grid, self.values * self._other(c))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return GridFunction(self.grid, self.values / c)

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __abs__(self):
        return GridFunction(self.grid, np.abs(self.values))

    def is_zero(self):
        return not np.any(self.values)

    def interpolate(self, x):
        """Piecewise-linear interpolant at arbitrary points, zero outside ``(a, b)``."""
        g = self.grid
        xp = np.concatenate(([g.a], g.nodes, [g.b]))
        fp = np.concatenate(([0.0], self.values, [0.0]))
        return np.interp(np.asarray(x, dtype=float), xp, fp, left=0.0, right=0.0)

    def to_csv(self, path=None):
        """Write ``x,u`` rows with 17 significant digits; return the text."""
        buf = io.StringIO()
        buf.write("x,u\n")
        for xi, ui in zip(self.grid.nodes, self.values):
            buf.write(f"{xi:.17g},{ui:.17g}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path, a, b):
        """Read a CSV written by :meth:`to_csv`; the interval is not stored in the file."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if [c.strip() for c in header] != ["x", "u"]:
                raise DomainError(f"expected header 'x,u', got {header!r}")
            rows = [(float(r[0]), float(r[1])) for r in reader if r]
        grid = Grid1D(a, b, len(rows))
        x = np.array([r[0] for r in rows])
        if not np.allclose(x, grid.nodes, rtol=0, atol=1e-12 * max(1.0, grid.length)):
            raise GridMismatchError("CSV nodes do not match a uniform grid on (a, b)")
        return cls(grid, [r[1] for r in rows])


def check_same_grid(*fns):
    grid = fns[0].grid
    for f in fns[1:]:
        if f.grid != grid:
            raise GridMismatchError(f"grid mismatch: {grid} vs {f.grid}")
    return grid


def as_grid_function(u, grid=None):
    """Coerce arrays to :class:`GridFunction` (validation helper)."""
    if isinstance(u, GridFunction):
        if grid is not None and u.grid != grid:
            raise GridMismatchError(f"grid mismatch: {grid} vs {u.grid}")
        return u
    if grid is None:
        raise TypeError("a grid is required to wrap a raw array")
    return GridFunction(grid, u)


def lp_norm(u, p=2.0):
    """Discrete ``L^p`` norm ``(h sum |u_i|^p)^{1/p}``; ``p = inf`` gives the max norm."""
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise DomainError(f"p must be >= 1, got {p!r}")
    v = np.abs(u.values)
    if math.isinf(p):
        return float(v.max(initial=0.0))
    if p == 2.0:
        return math.sqrt(u.grid.h * float(v @ v))
    return float((u.grid.h * np.sum(v**p)) ** (1.0 / p))


def lp_power(u, p):
    """``lp_norm(u, p) ** p`` without the round trip through the root."""
    return u.grid.h * float(np.sum(np.abs(u.values) ** p))


def inner_l2(u, v):
    """Discrete ``L^2`` inner product ``h sum u_i v_i``."""
    check_same_grid(u, v)
    return u.grid.h * float(u.values @ v.values)


def bump(grid, scale=1.0):
    """The smooth bump ``exp(-1/(1-t^2))`` mapped onto ``(a, b)``."""
    c = 0.5 * (grid.a + grid.b)
    r = 0.5 * grid.length
    t2 = ((grid.nodes - c) / r) ** 2
    vals = np.zeros(grid.n)
    inside = t2 < 1.0
    vals[inside] = np.exp(-1.0 / (1.0 - t2[inside]))
    return GridFunction(grid, scale * vals)
