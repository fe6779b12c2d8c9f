"""Seeded smooth test profiles vanishing at the ends of the interval."""
from __future__ import annotations

import numpy as np

from .grid import GridFunction


def _unit_coordinate(grid):
    # t in (0, 1) across the interval
    return (grid.nodes - grid.a) / grid.length


def random_profile(grid, rng, modes=8, positive=False):
    """Random sine combination, mollified to vanish at the boundary.

    With ``positive=True`` the profile is ``envelope * exp(0.5 * combination)``
    and so strictly positive inside the interval.
    """
    t = _unit_coordinate(grid)
    k = np.arange(1, modes + 1)
    coef = rng.normal(size=modes) / k
    comb = np.sin(np.pi * np.outer(t, k)) @ coef
    envelope = np.sqrt(t * (1.0 - t)) * 2.0
    if positive:
        vals = envelope * np.exp(0.5 * comb)
    else:
        vals = envelope * comb
    scale = np.exp(rng.normal())
    return GridFunction(grid, scale * vals)


def profile_suite(grid, count, seed, positive=False, modes=8):
    rng = np.random.default_rng(seed)
    return [random_profile(grid, rng, modes=modes, positive=positive) for _ in range(count)]
