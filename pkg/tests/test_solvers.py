import json
import math

import numpy as np
import pytest

from loglab.energies import ProblemSpec, energy_log, energy_s, grad_energy_log, grad_energy_s
from loglab.exceptions import DomainError
from loglab.grid import build_grid, bump, lp_norm, lp_power
from loglab.nonlocal_ops import cached_fraclap, cached_loglap, quad_form
from loglab.solvers import (
    SolverOptions,
    first_eigen_laplace,
    first_eigen_loglap,
    initial_guess,
    minimality_probe,
    mountain_pass_check,
    rayleigh_quotient,
    solve_least_energy_log,
    solve_least_energy_s,
)

SPEC = ProblemSpec(0.25, 0.1)
OPTS = SolverOptions()


@pytest.fixture(scope="module")
def frac(grid256):
    return solve_least_energy_s(SPEC, grid256, OPTS)


@pytest.fixture(scope="module")
def log(grid256):
    return solve_least_energy_log(1.0, grid256, OPTS)


def test_options_validation():
    for bad in (dict(tol=0.0), dict(max_iter=0), dict(max_iter=2.5), dict(step0=-1.0), dict(armijo=1.0)):
        with pytest.raises(DomainError):
            SolverOptions(**bad)
    assert SolverOptions() == SolverOptions(1e-8, 20000, 1.0, 1e-4, 0)


@pytest.mark.parametrize("which", ["frac", "log"])
def test_converged_postconditions(request, which):
    rep = request.getfixturevalue(which)
    assert rep.converged
    assert rep.residual <= OPTS.tol
    assert rep.energy.relative_residual() <= 10 * OPTS.tol
    assert rep.sign_constant
    assert np.all(rep.solution.values > 0)
    assert rep.monotonicity_violations == 0
    # raw differences may show round-off near convergence, nothing larger
    hist = np.asarray(rep.energy_history)
    assert np.all(np.diff(hist) <= 1e3 * np.finfo(float).eps * np.abs(hist[1:]))


def test_frac_gradient_vanishes(frac):
    g = grad_energy_s(frac.solution, frac.operator, SPEC)
    assert lp_norm(g, 2) / lp_norm(frac.solution, 2) <= OPTS.tol


def test_log_gradient_vanishes(log):
    g = grad_energy_log(log.solution, log.operator, 1.0)
    assert lp_norm(g, 2) / lp_norm(log.solution, 2) <= OPTS.tol


def test_frac_nehari_identity(frac):
    p = SPEC.p
    assert frac.J == pytest.approx((0.5 - 1 / p) * frac.norm_s**2, rel=10 * OPTS.tol)
    assert frac.norm_s == pytest.approx(math.sqrt(quad_form(frac.operator, frac.solution)), rel=1e-14)


def test_log_nehari_identity(log):
    assert abs(log.J - 0.25 * log.l2**2) <= 10 * OPTS.tol * abs(log.J)
    assert log.J == pytest.approx(energy_log(log.solution, log.operator, 1.0).total, rel=1e-15)


@pytest.mark.parametrize("which", ["frac", "log"])
def test_minimality_probe(request, which):
    rep = request.getfixturevalue(which)
    probe = minimality_probe(rep, count=20, seed=7)
    assert probe["energy_dominance"]
    assert probe["norm_dominance"]
    assert probe["J_solution"] <= probe["J_probe_min"]


def test_determinism(grid64):
    a = solve_least_energy_s(SPEC, grid64, OPTS)
    b = solve_least_energy_s(SPEC, grid64, OPTS)
    assert a.iterations == b.iterations
    assert np.array_equal(a.solution.values, b.solution.values)
    assert a.to_dict() == b.to_dict()


def test_initial_guess_sensitivity(grid256, log):
    other = solve_least_energy_log(1.0, grid256, SolverOptions(seed=3))
    assert other.converged
    assert initial_guess(grid256, 3).values.max() <= bump(grid256).values.max()
    assert other.J == pytest.approx(log.J, rel=1e-6)
    assert lp_norm(other.solution - log.solution, 2) <= 1e-3 * log.l2


def test_iteration_cap_reports_nonconvergence(grid64):
    rep = solve_least_energy_s(SPEC, grid64, SolverOptions(max_iter=2))
    assert not rep.converged
    assert rep.iterations == 2
    assert rep.residual > 1e-8


def test_report_json_fields(frac, tmp_path):
    text = frac.write(tmp_path / "r.json", tmp_path / "r.csv")
    doc = json.loads(text)
    for key in ("kind", "s", "mu", "n", "iterations", "residual", "J", "l2", "norm_s", "E_form", "sign_constant", "solution_csv"):
        assert key in doc
    assert doc["n"] == 256 and doc["kind"] == "fraclap"
    assert doc["J"] == frac.J
    assert (tmp_path / "r.csv").read_text().count("\n") == 257


def test_laplace_eigen_examples():
    for (a, b), exact in (((-1.0, 1.0), math.pi**2 / 4), ((0.0, 1.0), math.pi**2)):
        errs = []
        for n in (63, 127, 255):
            g = build_grid(a, b, n)
            errs.append(abs(first_eigen_laplace(g) - exact))
        assert errs[-1] <= 2e-4 * exact
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    assert first_eigen_laplace(build_grid(-1, 1, 127)) < first_eigen_laplace(build_grid(0, 1, 127))


def test_loglap_eigen(grid256):
    lam1, phi = first_eigen_loglap(grid256)
    assert lam1 <= math.log(first_eigen_laplace(grid256))
    assert lp_norm(phi, 2) == pytest.approx(1.0, rel=1e-12)
    assert np.all(phi.values > 0)
    assert rayleigh_quotient(cached_loglap(grid256), phi) == pytest.approx(lam1, rel=1e-12)


def test_loglap_eigen_rayleigh_stationary(grid256):
    lam1, phi = first_eigen_loglap(grid256)
    op = cached_loglap(grid256)
    rng = np.random.default_rng(0)
    for _ in range(10):
        d = grid256.function(rng.normal(size=256))
        d = d * (1e-6 / lp_norm(d, 2))
        # first-order term vanishes, so the change is O(|d|^2)
        assert abs(rayleigh_quotient(op, phi + d) - lam1) <= 1e-9


def test_mountain_pass(log):
    mp = mountain_pass_check(log)
    assert mp["max_matches"]
    assert mp["kappa_start"] < 1.0 < mp["kappa_end"]
    assert mp["crossing_matches"]
    assert mp["unimodal"]
    assert energy_log(mp["r"] * log.solution, log.operator, 1.0).total < 0


def test_mountain_pass_needs_log(frac):
    with pytest.raises(DomainError):
        mountain_pass_check(frac)


def test_frac_solution_matches_energy(frac):
    e = energy_s(frac.solution, cached_fraclap(frac.grid, 0.1), SPEC)
    assert e.total == frac.J
    assert frac.l2 == pytest.approx(math.sqrt(lp_power(frac.solution, 2)), rel=1e-14)
