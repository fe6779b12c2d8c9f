"""Least-energy solvers, Dirichlet eigenvalues and the mountain-pass check.

Both ground-state solvers run the same projected-gradient loop: take a
gradient step, map the trial point back onto the Nehari manifold with the
closed-form fibering scale, and accept by an Armijo test on the projected
energy.  Because projection is exact, every accepted iterate is a Nehari
element and the energy sequence is non-increasing.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal
from scipy.optimize import minimize_scalar

from .energies import (
    ProblemSpec,
    check_mu,
    energy_log,
    energy_s,
    grad_energy_log,
    grad_energy_s,
    kappa_map,
    project_nehari_0,
    project_nehari_s,
)
from .exceptions import DomainError, LoglabError
from .grid import GridFunction, bump, lp_norm
from .nonlocal_ops import FRACLAP, LOGLAP, cached_fraclap, cached_loglap, near_form, quad_form
from .profiles import profile_suite, random_profile
from .reporting import write_json

log = logging.getLogger(__name__)

_MAX_STEP = 1e8
_MIN_STEP = 1e-14


@dataclass(frozen=True)
class SolverOptions:
    """Stopping and line-search parameters.

    ``seed = 0`` starts from the plain bump; any other seed multiplies the bump
    by a seeded positive smooth perturbation (used to probe sensitivity to
    the initial guess).
    """

    tol: float = 1e-8
    max_iter: int = 20000
    step0: float = 1.0
    armijo: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError(f"tol must be positive, got {self.tol!r}")
        if isinstance(self.max_iter, bool) or int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise DomainError(f"max_iter must be an integer >= 1, got {self.max_iter!r}")
        if not self.step0 > 0:
            raise DomainError(f"step0 must be positive, got {self.step0!r}")
        if not 0.0 < self.armijo < 1.0:
            raise DomainError(f"armijo must lie in (0, 1), got {self.armijo!r}")
        object.__setattr__(self, "max_iter", int(self.max_iter))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(eq=False)
class SolveReport:
    kind: str
    solution: GridFunction
    energy: object
    iterations: int
    converged: bool
    residual: float
    sign_constant: bool
    l2: float
    quadratic_form_E: float
    norm_s: float
    mu: float
    s: float = 0.0
    monotonicity_violations: int = 0
    energy_history: list = field(default_factory=list, repr=False)
    operator: object = field(default=None, repr=False)

    @property
    def J(self):
        return self.energy.total

    @property
    def grid(self):
        return self.solution.grid

    def to_dict(self, solution_csv=None):
        return {
            "kind": self.kind,
            "s": self.s,
            "mu": self.mu,
            "n": self.grid.n,
            "iterations": self.iterations,
            "converged": self.converged,
            "residual": self.residual,
            "J": self.J,
            "l2": self.l2,
            "norm_s": self.norm_s,
            "E_form": self.quadratic_form_E,
            "sign_constant": self.sign_constant,
            "nehari_relative_residual": self.energy.relative_residual(),
            "solution_csv": None if solution_csv is None else str(solution_csv),
        }

    def write(self, json_path, csv_path):
        self.solution.to_csv(csv_path)
        return write_json(self.to_dict(csv_path), json_path)


def initial_guess(grid, seed=0):
    u = bump(grid)
    if seed:
        rng = np.random.default_rng(seed)
        pert = random_profile(grid, rng, positive=True)
        u = GridFunction(grid, u.values * pert.values / pert.values.max())
    return u


def _normalise_sign(u):
    return -u if float(np.mean(u.values)) < 0 else u


def _sign_constant(u):
    v = u.values
    return bool(np.all(v > 0) or np.all(v < 0))


def _energy_change(u, v, Ju, Jv, gradient, ulp):
    """``J(v) - J(u)``, switching to the midpoint rule when the plain
    difference is within round-off of ``J``.

    ``<grad J((u+v)/2), v - u>`` is exact for quadratics and its error is
    cubic in ``|v - u|``, so it stays accurate where subtraction cancels.
    """
    d = Jv - Ju
    if abs(d) > 1e3 * ulp * max(abs(Ju), abs(Jv)):
        return d
    mid = 0.5 * (u + v)
    return u.grid.h * float(gradient(mid).values @ (v - u).values)


def projected_gradient(u, energy, gradient, project, opts):
    """Armijo projected gradient on a Nehari manifold.

    Returns ``(u, iterations, converged, residual, history, violations)``.
    The trial step doubles after each acceptance so that flat landscapes do
    not stall at ``step0``.
    """
    h = u.grid.h
    u = project(u)
    J = energy(u)
    history = [J]
    violations = 0
    tau = opts.step0
    residual = math.inf
    ulp = np.finfo(float).eps
    for it in range(opts.max_iter + 1):
        g = gradient(u)
        gsq = h * float(g.values @ g.values)
        residual = math.sqrt(gsq) / lp_norm(u, 2.0)
        if residual <= opts.tol:
            return u, it, True, residual, history, violations
        if it == opts.max_iter:
            break
        while True:
            trial = project(u - tau * g)
            J_trial = energy(trial)
            dJ = _energy_change(u, trial, J, J_trial, gradient, ulp)
            if dJ <= -opts.armijo * tau * gsq:
                break
            tau *= 0.5
            if tau < _MIN_STEP:
                break
        if tau < _MIN_STEP:
            log.warning("line search stalled at iteration %d (residual %.3g)", it, residual)
            return u, it, False, residual, history, violations
        if dJ > 0:
            violations += 1
            log.error("energy increased at iteration %d: %.17g -> %.17g", it, J, J_trial)
        u, J = trial, J_trial
        history.append(J)
        tau = min(2.0 * tau, _MAX_STEP)
    return u, opts.max_iter, False, residual, history, violations


def solve_least_energy_s(spec, grid, opts=None):
    """Least-energy solution of the fractional problem with exponent ``p(spec.s)``."""
    opts = opts or SolverOptions()
    if not 0.0 < spec.s < 0.25:
        raise DomainError(f"s must lie in (0, 1/4), got {spec.s!r}")
    op = cached_fraclap(grid, spec.s)
    s = spec.s

    def energy(v):
        return energy_s(v, op, spec, s).total

    def gradient(v):
        return grad_energy_s(v, op, spec, s)

    def project(v):
        return project_nehari_s(v, op, spec, s)

    u, it, ok, res, hist, viol = projected_gradient(initial_guess(grid, opts.seed), energy, gradient, project, opts)
    u = _normalise_sign(u)
    br = energy_s(u, op, spec, s)
    return SolveReport(
        kind=FRACLAP,
        solution=u,
        energy=br,
        iterations=it,
        converged=ok,
        residual=res,
        sign_constant=_sign_constant(u),
        l2=lp_norm(u, 2.0),
        quadratic_form_E=near_form(cached_loglap(grid), u),
        norm_s=math.sqrt(quad_form(op, u)),
        mu=spec.mu,
        s=s,
        monotonicity_violations=viol,
        energy_history=hist,
        operator=op,
    )


def solve_least_energy_log(mu, grid, opts=None):
    """Least-energy solution of the logarithmic problem with slope ``mu``."""
    opts = opts or SolverOptions()
    mu = check_mu(mu)
    op = cached_loglap(grid)

    def energy(v):
        return energy_log(v, op, mu).total

    def gradient(v):
        return grad_energy_log(v, op, mu)

    def project(v):
        return project_nehari_0(v, op, mu)

    u, it, ok, res, hist, viol = projected_gradient(initial_guess(grid, opts.seed), energy, gradient, project, opts)
    u = _normalise_sign(u)
    l2 = lp_norm(u, 2.0)
    return SolveReport(
        kind=LOGLAP,
        solution=u,
        energy=energy_log(u, op, mu),
        iterations=it,
        converged=ok,
        residual=res,
        sign_constant=_sign_constant(u),
        l2=l2,
        quadratic_form_E=near_form(op, u),
        norm_s=l2,
        mu=mu,
        s=0.0,
        monotonicity_violations=viol,
        energy_history=hist,
        operator=op,
    )


def minimality_probe(report, count=20, seed=7, lam=None):
    """Compare the solution with projected seeded positive profiles.

    Two characterisations of the least-energy level are checked separately:
    the energy itself and the Nehari-equivalent norm (``||u||_s`` for the
    fractional problem, ``|u|_2`` for the logarithmic one).
    """
    grid = report.grid
    op = report.operator
    tol = 1e-8 * max(1.0, abs(report.J))
    rows = []
    if report.kind == FRACLAP:
        spec = ProblemSpec(lam if lam is not None else report.mu / 4.0, report.s)
        for phi in profile_suite(grid, count, seed, positive=True):
            w = project_nehari_s(phi, op, spec)
            rows.append((energy_s(w, op, spec).total, math.sqrt(quad_form(op, w))))
        own_norm = report.norm_s
    else:
        for phi in profile_suite(grid, count, seed, positive=True):
            w = project_nehari_0(phi, op, report.mu)
            rows.append((energy_log(w, op, report.mu).total, lp_norm(w, 2.0)))
        own_norm = report.l2
    energies = np.array([r[0] for r in rows])
    norms = np.array([r[1] for r in rows])
    return {
        "J_solution": report.J,
        "J_probe_min": float(energies.min()),
        "energy_dominance": bool(np.all(report.J <= energies + tol)),
        "norm_solution": own_norm,
        "norm_probe_min": float(norms.min()),
        "norm_dominance": bool(np.all(own_norm <= norms * (1.0 + 1e-8))),
        "count": count,
        "seed": seed,
    }


def first_eigen_loglap(grid, opts=None):
    """Smallest eigenvalue of the discrete log Laplacian and its eigenfunction.

    The eigenfunction is normalised to ``|u|_2 = 1`` with nonnegative mean.
    """
    op = cached_loglap(grid)
    vals, vecs = eigh(op.matrix, subset_by_index=[0, 0])
    v = vecs[:, 0] / math.sqrt(grid.h)
    u = _normalise_sign(GridFunction(grid, v))
    return float(vals[0]), u


def first_eigen_laplace(grid):
    """First Dirichlet eigenvalue of the three-point Laplacian."""
    n = grid.n
    h2 = grid.h**2
    vals = eigh_tridiagonal(
        np.full(n, 2.0 / h2), np.full(n - 1, -1.0 / h2), eigvals_only=True, select="i", select_range=(0, 0)
    )
    return float(vals[0])


def rayleigh_quotient(op, u):
    return quad_form(op, u) / lp_norm(u, 2.0) ** 2


class MountainPassError(LoglabError, RuntimeError):
    """No negative-energy endpoint was found along the ray."""


def mountain_pass_check(report, mu=None, opts=None, points=512, max_doublings=60):
    """Maximise ``J_0`` along ``t -> t r u0`` and locate where ``kappa`` crosses 1.

    ``r`` is the first power of two with ``J_0(r u0) < 0``.  The grid maximum
    is refined by a bounded scalar search on the neighbouring cells.
    """
    opts = opts or SolverOptions()
    if report.kind != LOGLAP:
        raise DomainError("mountain_pass_check needs a logarithmic ground state")
    mu = report.mu if mu is None else check_mu(mu)
    op = report.operator
    u0 = report.solution

    def J(t):
        return energy_log(t * u0, op, mu).total

    r = 1.0
    for _ in range(max_doublings):
        if J(r) < 0:
            break
        r *= 2.0
    else:
        raise MountainPassError(f"J_0(r u0) stayed nonnegative up to r = {r:g}")

    # cell midpoints: with r a power of two, t r never lands exactly on 1
    t = (np.arange(1, points + 1) - 0.5) / points
    path = np.array([J(r * tk) for tk in t])
    kappa = np.array([kappa_map(r * tk * u0, op, mu) for tk in t])
    resid = np.array([energy_log(r * tk * u0, op, mu).nehari_residual for tk in t])
    k = int(np.argmax(path))
    lo = t[max(k - 1, 0)]
    hi = t[min(k + 1, points - 1)]
    opt = minimize_scalar(lambda x: -J(r * x), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    refined = max(-float(opt.fun), float(path[k]))
    J0 = report.J
    diffs = np.diff(path)
    sign_changes = int(np.count_nonzero(np.diff(np.sign(diffs[diffs != 0])) != 0))
    kappa_cell = int(np.argmax(kappa >= 1.0)) if np.any(kappa >= 1.0) else -1
    resid_cell = int(np.argmax(resid <= 0.0)) if np.any(resid <= 0.0) else -1
    rel_gap = abs(refined - J0) / abs(J0)
    return {
        "r": r,
        "points": points,
        "J0_u0": J0,
        "path_max_grid": float(path[k]),
        "path_max": refined,
        "t_max": float(opt.x),
        "relative_gap": rel_gap,
        "max_matches": bool(rel_gap <= 10.0 * opts.tol),
        "kappa_start": float(kappa[0]),
        "kappa_end": float(kappa[-1]),
        "kappa_crossing_index": kappa_cell,
        "residual_sign_change_index": resid_cell,
        "crossing_matches": bool(kappa_cell >= 0 and kappa_cell == resid_cell),
        "kappa_crossing_t": float(t[kappa_cell]) if kappa_cell >= 0 else None,
        "unimodal": sign_changes == 1,
    }


__all__ = [
    "MountainPassError",
    "SolveReport",
    "SolverOptions",
    "first_eigen_laplace",
    "first_eigen_loglap",
    "initial_guess",
    "minimality_probe",
    "mountain_pass_check",
    "projected_gradient",
    "rayleigh_quotient",
    "solve_least_energy_log",
    "solve_least_energy_s",
]
