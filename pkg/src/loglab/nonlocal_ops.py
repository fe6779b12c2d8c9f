"""Dense discretisations of the fractional and logarithmic Laplacians on 1-D grids.

Nodal values are read as the piecewise-linear interpolant ``u = sum_j u_j phi_j``
(hat functions, ``u = 0`` outside ``(a, b)``) and each operator is collocated
at the nodes.  With a translation-invariant kernel every hat integral is exact,
so both matrices are symmetric Toeplitz:

* fractional:  ``A_ii = c_{1,s} int (1 - phi_i) K_s``,  ``A_ij = -c_{1,s} int phi_j K_s(x_i - .)``
* logarithmic: ``A_ii = 2 c_1 (1 - ln h) + rho_1``,     ``A_ij = -c_1 int phi_j / |x_i - .|``

The exterior tail of the fractional kernel is part of the ``(1 - phi_i)``
integral, so no domain truncation occurs.  The fractional diagonal integral
diverges for ``s >= 1/2``; there the first cell is handled by a second
difference (see :func:`assemble_fraclap`).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import toeplitz

from .exceptions import DomainError, FourierTruncationWarning, GridMismatchError, KindMismatchError
from .grid import Grid1D, GridFunction, check_same_grid
from .specialfn import const_cNs, dimensional_constants

FRACLAP = "fraclap"
LOGLAP = "loglap"

_SERIES_TERMS = 40


@dataclass(frozen=True, eq=False)
class NonlocalOperator:
    """Assembled operator; ``matrix`` acts on nodal vectors.

    For ``kind == "loglap"`` the near-field matrix ``near`` and the far-field
    matrix ``far`` satisfy ``matrix = near - c_1 far + rho_1 I``.
    """

    kind: str
    grid: Grid1D
    matrix: np.ndarray = field(repr=False)
    s: float | None = None
    near: np.ndarray | None = field(default=None, repr=False)
    far: np.ndarray | None = field(default=None, repr=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("matrix", "near", "far"):
            m = getattr(self, name)
            if m is not None:
                m = np.array(m, dtype=float, copy=True)
                m.setflags(write=False)
                object.__setattr__(self, name, m)

    @property
    def n(self):
        return self.grid.n

    def asymmetry(self):
        m = self.matrix
        return float(np.max(np.abs(m - m.T)) / np.max(np.abs(m)))

    def to_csv(self, path=None):
        """Debug dump as ``i,j,A_ij`` triples (not a stable format)."""
        lines = ["i,j,A_ij"]
        m = self.matrix
        for i in range(m.shape[0]):
            for j in range(m.shape[1]):
                lines.append(f"{i},{j},{m[i, j]:.17g}")
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _second_difference_series(k, beta):
    """``k^beta * 2 sum_j T_j k^{-2j}`` for integer ``k >= 2``.

    This equals ``[(k+1)^beta - 2 k^beta + (k-1)^beta] / (beta (beta - 1))``,
    summed with positive terms only so nothing cancels for large ``k`` or
    ``beta`` close to 1.
    """
    k = np.asarray(k, dtype=float)
    eps2 = 1.0 / (k * k)
    term = np.full_like(k, 0.5)
    total = np.zeros_like(k)
    power = eps2.copy()
    for j in range(1, _SERIES_TERMS + 1):
        total += term * power
        term = term * (beta - 2 * j) * (beta - 2 * j - 1) / ((2 * j + 1) * (2 * j + 2))
        power = power * eps2
    return 2.0 * k**beta * total


def hat_kernel_weights(n_offsets, s):
    """``int phi(t) |k + t|^{-1-2s} dt`` on the unit grid for ``k = 1..n_offsets``.

    ``s = 0`` gives the weights of the kernel ``1/|r|``.  The unit-spacing
    result is scaled by ``h^{-2s}`` for a grid of spacing ``h``.
    """
    alpha = 2.0 * s
    beta = 1.0 - alpha
    k = np.arange(1, n_offsets + 1, dtype=float)
    w = np.empty_like(k)
    if n_offsets >= 1:
        if alpha == 0.0:
            w[0] = 2.0 * math.log(2.0)
        elif alpha >= 1.0:
            # the touching neighbour's integral diverges once 2s >= 1
            w[0] = math.inf
        else:
            # (2^beta - 2) / (beta (beta - 1))
            w[0] = 2.0 * math.expm1(-alpha * math.log(2.0)) / (-alpha * beta)
    if n_offsets >= 2:
        w[1:] = _second_difference_series(k[1:], beta)
    return w


def _first_cell_weight(alpha):
    """``int_1^2 (2 - t) t^{-1-alpha} dt``: neighbour weight outside the first cell."""
    if alpha == 1.0:
        return 1.0 - math.log(2.0)
    return 2.0 * (1.0 - 2.0 ** -alpha) / alpha - (2.0 ** (1.0 - alpha) - 1.0) / (1.0 - alpha)


def assemble_fraclap(grid, s):
    """Fractional Laplacian ``(-Delta)^s`` with the exterior Dirichlet condition.

    For ``s < 1/2`` the matrix is the exact collocation of the piecewise-linear
    interpolant.  From ``s = 1/2`` on that integral diverges at the kink, so the
    first cell uses the centred second difference instead.
    """
    s = float(s)
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s!r}")
    h = grid.h
    alpha = 2.0 * s
    c = const_cNs(1, s)
    scale = c * h ** (-alpha)
    col = np.empty(grid.n)
    col[1:] = -scale * hat_kernel_weights(grid.n - 1, s)
    if s < 0.5:
        col[0] = scale * 2.0 * (1.0 / (1.0 - alpha) + 1.0 / alpha)
        scheme = "p1-collocation"
    else:
        col[0] = scale * 2.0 * (1.0 / (2.0 - alpha) + 1.0 / alpha)
        if grid.n > 1:
            col[1] = -scale * (1.0 / (2.0 - alpha) + _first_cell_weight(alpha))
        scheme = "p1-collocation, second-difference first cell"
    return NonlocalOperator(
        FRACLAP,
        grid,
        toeplitz(col),
        s=s,
        meta={"c_1s": c, "scheme": scheme, "tail": "closed-form"},
    )


def far_field_weights(grid):
    """Exact ``int_{|y - x_i| >= 1} phi_j(y) / |x_i - y| dy`` by offset ``|i - j|``."""
    h = grid.h
    d = h * np.arange(grid.n, dtype=float)
    out = np.zeros(grid.n)
    clear = d - h >= 1.0
    if np.any(clear):
        k = d[clear] / h
        out[clear] = _second_difference_series(k, 1.0)
    straddle = (~clear) & (d + h > 1.0)
    for idx in np.flatnonzero(straddle):
        c = np.array([d[idx] - h, d[idx], d[idx] + h])
        m = np.maximum(c, 1.0)
        out[idx] = -(m[0] - c[0] * math.log(m[0]) - 2.0 * (m[1] - c[1] * math.log(m[1])) + m[2] - c[2] * math.log(m[2])) / h
    return out


def assemble_loglap(grid):
    """Logarithmic Laplacian with near-field, far-field and zero-order parts."""
    if grid.length > 2.0:
        warnings.warn(
            "interval wider than 2: near-field matrix is no longer banded by the unit ball",
            RuntimeWarning,
            stacklevel=2,
        )
    consts = dimensional_constants(1)
    h = grid.h
    col = np.empty(grid.n)
    col[0] = consts.c_N * 2.0 * (1.0 - math.log(h))
    col[1:] = -consts.c_N * hat_kernel_weights(grid.n - 1, 0.0)
    total = toeplitz(col) + consts.rho_N * np.eye(grid.n)
    far = toeplitz(far_field_weights(grid))
    near = total + consts.c_N * far - consts.rho_N * np.eye(grid.n)
    return NonlocalOperator(
        LOGLAP,
        grid,
        total,
        near=near,
        far=far,
        meta={"c_1": consts.c_N, "rho_1": consts.rho_N, "scheme": "p1-collocation"},
    )


@lru_cache(maxsize=16)
def cached_fraclap(grid, s):
    """Memoised :func:`assemble_fraclap`; operators are immutable so sharing is safe."""
    return assemble_fraclap(grid, s)


@lru_cache(maxsize=8)
def cached_loglap(grid):
    return assemble_loglap(grid)


def _check(op, *fns):
    for f in fns:
        if f.grid != op.grid:
            raise GridMismatchError(f"operator grid {op.grid} vs function grid {f.grid}")


def apply(op, u):
    _check(op, u)
    return GridFunction(op.grid, op.matrix @ u.values)


def quad_form(op, u, v=None):
    """``h v^T A u``; ``v`` defaults to ``u``."""
    v = u if v is None else v
    _check(op, u, v)
    return op.grid.h * float(v.values @ (op.matrix @ u.values))


def near_form(op, u, v=None):
    """Near-field scalar product ``E(u, v)`` (the H-norm form) of a log operator."""
    if op.kind != LOGLAP:
        raise KindMismatchError("near_form needs a logarithmic Laplacian")
    v = u if v is None else v
    _check(op, u, v)
    return op.grid.h * float(v.values @ (op.near @ u.values))


def far_bilinear(u, v=None):
    """``int int_{|x-y| >= 1} u(x) v(y) / |x - y|`` for the interpolants."""
    v = u if v is None else v
    grid = check_same_grid(u, v)
    w = far_field_weights(grid)
    if not np.any(w):
        return 0.0
    return grid.h * float(v.values @ (toeplitz(w) @ u.values))


def _panel_moments(lo, hi, symbol, s):
    """Exact ``int S`` and ``int xi S`` over panels for the two symbols."""
    if symbol == LOGLAP:
        def F0(x):
            return np.where(x > 0, 2.0 * (x * np.log(np.where(x > 0, x, 1.0)) - x), 0.0)

        def F1(x):
            return np.where(x > 0, x * x * np.log(np.where(x > 0, x, 1.0)) - 0.5 * x * x, 0.0)
    else:
        q = 2.0 * s

        def F0(x):
            return x ** (q + 1.0) / (q + 1.0)

        def F1(x):
            return x ** (q + 2.0) / (q + 2.0)
    return F0(hi) - F0(lo), F1(hi) - F1(lo)


def _hat_spectrum_sq(u, xi, chunk=512):
    g = u.grid
    x = g.nodes
    out = np.empty_like(xi)
    for start in range(0, xi.size, chunk):
        z = xi[start:start + chunk]
        phase = np.outer(z, x)
        re = np.cos(phase) @ u.values
        im = np.sin(phase) @ u.values
        half = 0.5 * z * g.h
        sinc2 = np.ones_like(z)
        nz = half != 0
        sinc2[nz] = (np.sin(half[nz]) / half[nz]) ** 2
        out[start:start + chunk] = (g.h * sinc2) ** 2 * (re * re + im * im) / (2.0 * np.pi)
    return out


def fourier_form(u, kind=LOGLAP, s=None, xi_max=256.0, points_per_unit=32, tail_tol=0.005):
    """Symbol-weighted ``int S(xi) |u^(xi)|^2`` of the piecewise-linear interpolant.

    ``kind="fraclap"`` uses ``S = |xi|^{2s}``; ``kind="loglap"`` uses
    ``S = 2 ln|xi|``.  The cut-off ``xi_max`` doubles until the contribution of
    the last half-octave falls below ``tail_tol`` of the value (or a cap is
    hit); a :class:`FourierTruncationWarning` is issued if the final tail still
    exceeds 1%.
    """
    if kind == FRACLAP:
        if s is None or not 0.0 < float(s) < 1.0:
            raise DomainError("fraclap symbol needs s in (0, 1)")
        s = float(s)
    elif kind != LOGLAP:
        raise KindMismatchError(f"unknown symbol kind {kind!r}")
    if points_per_unit < 8:
        raise DomainError("need at least 8 xi points per unit")
    if u.is_zero():
        return 0.0
    cap = 8.0 * math.pi / u.grid.h
    xi_max = float(min(xi_max, cap))
    while True:
        m = int(math.ceil(xi_max * points_per_unit))
        xi = np.linspace(0.0, xi_max, m + 1)
        f = _hat_spectrum_sq(u, xi)
        m0, m1 = _panel_moments(xi[:-1], xi[1:], kind, s)
        dx = xi[1:] - xi[:-1]
        # linear interpolation of f on each panel, integrated against S exactly
        slope = (f[1:] - f[:-1]) / dx
        panels = f[:-1] * m0 + slope * (m1 - xi[:-1] * m0)
        value = 2.0 * float(np.sum(panels))
        tail = 2.0 * abs(float(np.sum(panels[xi[:-1] >= 0.5 * xi_max])))
        if tail <= tail_tol * abs(value) or xi_max >= cap:
            break
        xi_max = min(2.0 * xi_max, cap)
    if tail > 0.01 * abs(value):
        warnings.warn(
            f"Fourier tail estimate {tail:.3g} exceeds 1% of value {value:.3g}",
            FourierTruncationWarning,
            stacklevel=2,
        )
    return value
