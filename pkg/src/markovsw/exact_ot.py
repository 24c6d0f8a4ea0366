"""Exact Wasserstein distance for uniform, equal-size point clouds.

With n atoms of mass 1/n on each side an optimal plan can be taken to be a
permutation, so ``W_p^p = min_sigma (1/n) sum_i ||x_i - y_sigma(i)||_2^p``.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .gradients import UnsupportedConfiguration
from .measure import EmpiricalMeasure, check_same_dim

MAX_ASSIGNMENT = 2000
MAX_BRUTE_FORCE = 7


class ResourceLimit(ValueError):
    pass


def _check(mu: EmpiricalMeasure, nu: EmpiricalMeasure, cap: int) -> None:
    check_same_dim(mu, nu)
    if mu.n != nu.n or not (mu.uniform and nu.uniform):
        raise UnsupportedConfiguration("exact OT is limited to uniform measures of equal size")
    if mu.n > cap:
        raise ResourceLimit(f"n={mu.n} exceeds the cap of {cap}")


def cost_matrix(mu: EmpiricalMeasure, nu: EmpiricalMeasure, p: float) -> np.ndarray:
    c = cdist(mu.supports, nu.supports, metric="euclidean")
    return c if p == 1 else c ** p


def exact_wasserstein(mu: EmpiricalMeasure, nu: EmpiricalMeasure, p: float = 2.0) -> float:
    _check(mu, nu, MAX_ASSIGNMENT)
    cost = cost_matrix(mu, nu, p)
    rows, cols = linear_sum_assignment(cost)
    return float(np.mean(cost[rows, cols])) ** (1.0 / p)


def brute_force_wasserstein(mu: EmpiricalMeasure, nu: EmpiricalMeasure, p: float = 2.0) -> float:
    """Minimum over all ``n!`` matchings; a test oracle for small n."""
    _check(mu, nu, MAX_BRUTE_FORCE)
    cost = cost_matrix(mu, nu, p)
    idx = np.arange(mu.n)
    best = min(cost[idx, list(perm)].sum() for perm in itertools.permutations(range(mu.n)))
    return float(best / mu.n) ** (1.0 / p)
