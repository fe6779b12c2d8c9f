"""scikit-learn style wrappers around the operators and ground-state solvers.

The operator transformers act on rows of a sample matrix: each row holds the
nodal values of one function on a uniform grid of ``n_features`` interior
nodes.  The ground-state estimators take no training data; ``fit`` solves the
problem and ``predict`` evaluates the piecewise-linear solution at points.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .energies import ProblemSpec
from .grid import Grid1D
from .nonlocal_ops import cached_fraclap, cached_loglap
from .solvers import SolverOptions, solve_least_energy_log, solve_least_energy_s


class _OperatorTransformer(TransformerMixin, BaseEstimator):

    def _assemble(self, grid):
        raise NotImplementedError

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_features=4)
        self.grid_ = Grid1D(self.a, self.b, X.shape[1])
        self.operator_ = self._assemble(self.grid_)
        self.n_features_in_ = X.shape[1]
        return self

    def _rows(self, X):
        check_is_fitted(self, "operator_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, the operator was fitted with {self.n_features_in_}")
        return X

    def transform(self, X):
        """Apply the operator to every row."""
        X = self._rows(X)
        return X @ self.operator_.matrix.T

    def quadratic_form(self, X):
        """``h x^T A x`` for every row."""
        X = self._rows(X)
        return self.grid_.h * np.einsum("ij,ij->i", X @ self.operator_.matrix.T, X)


class FractionalLaplacian(_OperatorTransformer):
    """Row-wise ``(-Delta)^s`` with the exterior Dirichlet condition on ``(a, b)``."""

    def __init__(self, s=0.1, a=-1.0, b=1.0):
        self.s = s
        self.a = a
        self.b = b

    def _assemble(self, grid):
        return cached_fraclap(grid, float(self.s))

    def fit(self, X, y=None):
        super().fit(X, y)
        self.cholesky_ = cho_factor(self.operator_.matrix)
        return self

    def inverse_transform(self, X):
        """Solve ``A u = f`` for every row ``f`` (the operator is positive definite)."""
        X = self._rows(X)
        return cho_solve(self.cholesky_, X.T).T


class LogarithmicLaplacian(_OperatorTransformer):
    """Row-wise logarithmic Laplacian on ``(a, b)``."""

    def __init__(self, a=-1.0, b=1.0):
        self.a = a
        self.b = b

    def _assemble(self, grid):
        return cached_loglap(grid)


class _GroundState(RegressorMixin, BaseEstimator):

    def _options(self):
        return SolverOptions(tol=self.tol, max_iter=self.max_iter, seed=self.seed)

    def _finish(self, report):
        self.report_ = report
        self.grid_ = report.grid
        self.solution_ = report.solution.values
        self.energy_ = report.J
        self.n_iter_ = report.iterations
        self.converged_ = report.converged
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        """Piecewise-linear solution at the points in ``X`` (zero outside the interval)."""
        check_is_fitted(self, "report_")
        X = check_array(X, ensure_2d=False)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise ValueError("predict expects a single coordinate column")
            X = X[:, 0]
        return self.report_.solution.interpolate(X)


class FractionalGroundState(_GroundState):
    """Least-energy solution of the fractional problem with exponent ``p(s)``."""

    def __init__(self, lam=0.25, s=0.1, n=512, a=-1.0, b=1.0, tol=1e-8, max_iter=20000, seed=0):
        self.lam = lam
        self.s = s
        self.n = n
        self.a = a
        self.b = b
        self.tol = tol
        self.max_iter = max_iter
        self.seed = seed

    def fit(self, X=None, y=None):
        spec = ProblemSpec(self.lam, self.s)
        grid = Grid1D(self.a, self.b, self.n)
        return self._finish(solve_least_energy_s(spec, grid, self._options()))


class LogGroundState(_GroundState):
    """Least-energy solution of the logarithmic problem with slope ``mu``."""

    def __init__(self, mu=1.0, n=512, a=-1.0, b=1.0, tol=1e-8, max_iter=20000, seed=0):
        self.mu = mu
        self.n = n
        self.a = a
        self.b = b
        self.tol = tol
        self.max_iter = max_iter
        self.seed = seed

    def fit(self, X=None, y=None):
        grid = Grid1D(self.a, self.b, self.n)
        return self._finish(solve_least_energy_log(self.mu, grid, self._options()))
