"""Monte Carlo sliced Wasserstein (SW) and K-sliced Wasserstein (K-SW).

Every estimator draws its l-th projection (or block) from
``RngStream(seed, l)`` with l = 1..L, so estimators that share a seed share
their directions. This is what makes the bitwise reductions between SW,
K-SW with K=1 and MSW with T=1 hold.
"""

from __future__ import annotations

import numpy as np

from .measure import EmpiricalMeasure, check_same_dim
from .ot1d import wasserstein_1d_pth_power_many
from .sphere import RngStream, sample_stiefel_uniform, sample_uniform_sphere


def projected_pth_powers(mu: EmpiricalMeasure, nu: EmpiricalMeasure, thetas, p: float = 2.0) -> np.ndarray:
    """``W_p^p(theta# mu, theta# nu)`` for every row of ``thetas``."""
    check_same_dim(mu, nu)
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    uniform = mu.n == nu.n and mu.uniform and nu.uniform
    return wasserstein_1d_pth_power_many(mu.supports @ thetas.T, nu.supports @ thetas.T,
                                         mu.weights, nu.weights, p, uniform=uniform)


def sliced_pth_power(mu, nu, thetas, p: float = 2.0) -> float:
    """Average projected ``W_p^p`` over a fixed direction set."""
    return float(np.mean(projected_pth_powers(mu, nu, thetas, p)))


def sliced_distance(mu, nu, thetas, p: float = 2.0) -> float:
    return sliced_pth_power(mu, nu, thetas, p) ** (1.0 / p)


def _check_count(name: str, value: int) -> None:
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")


def sw_directions(d: int, L: int, seed: int) -> np.ndarray:
    _check_count("L", L)
    return np.stack([sample_uniform_sphere(d, RngStream(seed, l).generator()) for l in range(1, L + 1)])


def ksw_directions(d: int, L: int, K: int, seed: int) -> np.ndarray:
    """``L`` independent orthonormal blocks of ``K`` rows, stacked block by block."""
    _check_count("L", L)
    blocks = [sample_stiefel_uniform(d, K, RngStream(seed, l).generator()) for l in range(1, L + 1)]
    return np.concatenate(blocks, axis=0)


def sw_pth_power(mu, nu, p: float = 2.0, L: int = 10, seed: int = 0) -> float:
    check_same_dim(mu, nu)
    return sliced_pth_power(mu, nu, sw_directions(mu.d, L, seed), p)


def sw(mu, nu, p: float = 2.0, L: int = 10, seed: int = 0) -> float:
    """Monte Carlo SW_p with ``L`` uniform projections."""
    return sw_pth_power(mu, nu, p, L, seed) ** (1.0 / p)


def ksw_pth_power(mu, nu, p: float = 2.0, L: int = 10, K: int = 2, seed: int = 0) -> float:
    check_same_dim(mu, nu)
    return sliced_pth_power(mu, nu, ksw_directions(mu.d, L, K, seed), p)


def ksw(mu, nu, p: float = 2.0, L: int = 10, K: int = 2, seed: int = 0) -> float:
    """Monte Carlo K-SW_p with ``L`` orthonormal blocks of size ``K``."""
    return ksw_pth_power(mu, nu, p, L, K, seed) ** (1.0 / p)
