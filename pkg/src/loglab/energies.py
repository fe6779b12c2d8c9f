"""Energy functionals, Nehari projections and gradients for both problems.

The s-problem minimises ``J_s(u) = 1/2 ||u||_s^2 - 1/p_s |u|_{p_s}^{p_s}`` and the
limit problem minimises ``J_0(u) = 1/2 E_L(u, u) - mu/4 int u^2 (ln u^2 - 1)``.
Integrals are midpoint sums with weight ``h`` and ``0 ln 0 = 0`` throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateProjectionError, DomainError, KindMismatchError, ZeroInputError
from .grid import GridFunction, lp_power
from .nonlocal_ops import FRACLAP, LOGLAP, quad_form
from .specialfn import dimensional_constants

EXP_CLAMP = 50.0


@dataclass(frozen=True)
class ProblemSpec:
    """Exponent family ``p(s) = lam 2N/(N-2s) + (1-lam) 2`` and its slope ``mu`` at 0."""

    lam: float
    s: float = 0.0
    N: int = 1

    def __post_init__(self):
        if self.N != 1:
            raise DomainError("only N = 1 problems are assembled")
        lam = float(self.lam)
        if not 0.0 < lam < 1.0:
            raise DomainError(f"lambda must lie in (0, 1), got {self.lam!r}")
        s = float(self.s)
        if not (s == 0.0 or 0.0 < s < 0.25):
            raise DomainError(f"s must be 0 or lie in (0, 1/4), got {self.s!r}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "s", s)

    @property
    def mu(self):
        return 4.0 * self.lam / self.N

    @classmethod
    def from_mu(cls, mu, s=0.0, N=1):
        return cls(lam=check_mu(mu, N) * N / 4.0, s=s, N=N)

    def with_s(self, s):
        return ProblemSpec(self.lam, s, self.N)

    @property
    def p(self):
        return exponent(self, self.s)


def check_mu(mu, N=1):
    mu = float(mu)
    if not 0.0 < mu < 4.0 / N:
        raise DomainError(f"mu must lie in (0, {4.0 / N}), got {mu!r}")
    return mu


@dataclass(frozen=True)
class EnergyBreakdown:
    quadratic: float
    nonlinear: float
    total: float
    nehari_residual: float

    def relative_residual(self):
        q = abs(self.quadratic)
        return abs(self.nehari_residual) / q if q else abs(self.nehari_residual)


def exponent(spec, s):
    s = float(s)
    N = spec.N
    if not 0.0 <= s < N / 2.0:
        raise DomainError(f"s must lie in [0, N/2), got {s!r}")
    return spec.lam * 2.0 * N / (N - 2.0 * s) + (1.0 - spec.lam) * 2.0


def _require(op, kind):
    if op.kind != kind:
        raise KindMismatchError(f"expected a {kind} operator, got {op.kind}")


def _u2_log_u2(v):
    """Nodewise ``v^2 ln v^2`` with ``0 ln 0 = 0``."""
    v2 = v * v
    out = np.zeros_like(v2)
    nz = v2 > 0
    out[nz] = v2[nz] * np.log(v2[nz])
    return out


def _u_log_abs(v):
    out = np.zeros_like(v)
    nz = v != 0
    out[nz] = v[nz] * np.log(np.abs(v[nz]))
    return out


def int_u2_log_abs(u):
    """``h sum u_i^2 ln|u_i|``."""
    return 0.5 * u.grid.h * float(np.sum(_u2_log_u2(u.values)))


def energy_s(u, op_s, spec, s=None):
    _require(op_s, FRACLAP)
    s = op_s.s if s is None else float(s)
    p = exponent(spec, s)
    form = quad_form(op_s, u)
    mass = lp_power(u, p)
    quadratic = 0.5 * form
    nonlinear = mass / p
    return EnergyBreakdown(quadratic, nonlinear, quadratic - nonlinear, form - mass)


def energy_log(u, op_log, mu):
    _require(op_log, LOGLAP)
    mu = check_mu(mu)
    form = quad_form(op_log, u)
    h = u.grid.h
    v = u.values
    quadratic = 0.5 * form
    nonlinear = 0.25 * mu * h * float(np.sum(_u2_log_u2(v) - v * v))
    residual = form - mu * int_u2_log_abs(u)
    return EnergyBreakdown(quadratic, nonlinear, quadratic - nonlinear, residual)


def grad_energy_s(u, op_s, spec, s=None):
    _require(op_s, FRACLAP)
    s = op_s.s if s is None else float(s)
    p = exponent(spec, s)
    v = u.values
    return GridFunction(u.grid, op_s.matrix @ v - np.abs(v) ** (p - 2.0) * v)


def grad_energy_log(u, op_log, mu):
    _require(op_log, LOGLAP)
    mu = check_mu(mu)
    v = u.values
    return GridFunction(u.grid, op_log.matrix @ v - mu * _u_log_abs(v))


def nehari_scale_s(u, op_s, spec, s=None):
    """Fibering maximiser ``t`` with ``t u`` on the Nehari manifold of ``J_s``."""
    _require(op_s, FRACLAP)
    if u.is_zero():
        raise ZeroInputError("cannot project the zero function")
    s = op_s.s if s is None else float(s)
    p = exponent(spec, s)
    return (quad_form(op_s, u) / lp_power(u, p)) ** (1.0 / (p - 2.0))


def project_nehari_s(u, op_s, spec, s=None):
    return nehari_scale_s(u, op_s, spec, s) * u


def nehari_scale_0(w, op_log, mu):
    """``t_w^0``; raises :class:`DegenerateProjectionError` if ``|ln t| > 50``."""
    _require(op_log, LOGLAP)
    mu = check_mu(mu)
    if w.is_zero():
        raise ZeroInputError("cannot project the zero function")
    l2sq = lp_power(w, 2.0)
    expo = (quad_form(op_log, w) - mu * int_u2_log_abs(w)) / (mu * l2sq)
    if not abs(expo) <= EXP_CLAMP:
        raise DegenerateProjectionError(f"projection exponent {expo:.6g} outside [-50, 50]")
    return math.exp(expo)


def project_nehari_0(w, op_log, mu):
    return nehari_scale_0(w, op_log, mu) * w


def kappa_map(v, op_log, mu):
    """``exp((mu int v^2 ln|v| - E_L(v,v)) / |v|_2^2)``, with ``kappa(0) = 0``.

    ``kappa(v) = 1`` exactly on the Nehari manifold and ``kappa(t v) = t^mu kappa(v)``.
    """
    _require(op_log, LOGLAP)
    mu = check_mu(mu)
    if v.is_zero():
        return 0.0
    expo = (mu * int_u2_log_abs(v) - quad_form(op_log, v)) / lp_power(v, 2.0)
    return math.exp(expo)


def log_sobolev_gap(u, op_log, N=1):
    """RHS minus LHS of the logarithmic Sobolev inequality for ``u``."""
    _require(op_log, LOGLAP)
    if u.is_zero():
        raise ZeroInputError("the inequality is trivial for u = 0")
    a_N = dimensional_constants(N).a_N
    l2sq = lp_power(u, 2.0)
    rhs = quad_form(op_log, u) + (2.0 / N) * math.log(l2sq) * l2sq + a_N * l2sq
    lhs = (2.0 / N) * u.grid.h * float(np.sum(_u2_log_u2(u.values)))
    return rhs - lhs


def nehari_l2_lower_bound(lam, lambda1_L, N=1):
    """``exp((1-lam)/(4 lam) N lambda_1^L - N/2 a_N)``: no Nehari element has smaller ``|u|_2``."""
    a_N = dimensional_constants(N).a_N
    return math.exp((1.0 - lam) / (4.0 * lam) * N * lambda1_L - 0.5 * N * a_N)


__all__ = [
    "EnergyBreakdown",
    "ProblemSpec",
    "check_mu",
    "energy_log",
    "energy_s",
    "exponent",
    "grad_energy_log",
    "grad_energy_s",
    "int_u2_log_abs",
    "kappa_map",
    "log_sobolev_gap",
    "nehari_l2_lower_bound",
    "nehari_scale_0",
    "nehari_scale_s",
    "project_nehari_0",
    "project_nehari_s",
]
