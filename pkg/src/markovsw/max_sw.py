"""Max-SW and Max-K-SW by projected sub-gradient ascent on the sphere."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gradients import canonical_pair, grad_directions
from .measure import EmpiricalMeasure, check_same_dim
from .sphere import DegenerateInput, RngStream, gram_schmidt, retract_to_sphere, sample_stiefel_uniform, sample_uniform_sphere
from .sw import sliced_distance


class NumericalFailure(ArithmeticError):
    pass


@dataclass(frozen=True)
class AscentConfig:
    """Fixed-length plain ascent: ``steps`` directions, ``steps - 1`` updates."""

    steps: int = 10
    step_size: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if not (np.isfinite(self.step_size) and self.step_size > 0):
            raise ValueError(f"step_size must be finite and positive, got {self.step_size}")


def ascent_step(mu, nu, thetas: np.ndarray, eta: float, p: float) -> np.ndarray:
    """One un-normalized step ``theta + eta * grad W_p`` for each row of ``thetas``."""
    _, g = grad_directions(mu, nu, thetas, p)
    if not np.all(np.isfinite(g)):
        raise NumericalFailure("non-finite direction gradient")
    return thetas + eta * g


def max_sw(mu: EmpiricalMeasure, nu: EmpiricalMeasure, p: float = 2.0, cfg: AscentConfig = AscentConfig()):
    """Return ``(distance, direction)`` after ``cfg.steps - 1`` ascent updates.

    The start direction is uniform on the sphere, drawn from
    ``RngStream(cfg.seed, 1)``.
    """
    check_same_dim(mu, nu)
    a, b = canonical_pair(mu, nu)
    theta = sample_uniform_sphere(mu.d, RngStream(cfg.seed, 1).generator())
    for _ in range(cfg.steps - 1):
        theta = retract_to_sphere(ascent_step(a, b, theta[None, :], cfg.step_size, p)[0])
    return sliced_distance(mu, nu, theta[None, :], p), theta


def _reorthonormalize(block: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    block = block.copy()
    while True:
        try:
            return gram_schmidt(block)
        except DegenerateInput as exc:
            block[exc.index] = sample_uniform_sphere(block.shape[1], rng)


def max_ksw(mu: EmpiricalMeasure, nu: EmpiricalMeasure, p: float = 2.0, K: int = 2,
            cfg: AscentConfig = AscentConfig()):
    """Return ``(distance, block)`` with ``block`` a (K, d) orthonormal array.

    Each iteration moves every direction along its own gradient and then
    re-orthonormalizes the block with Gram-Schmidt. A direction that
    collapses onto its predecessors is redrawn uniformly.
    """
    check_same_dim(mu, nu)
    a, b = canonical_pair(mu, nu)
    rng = RngStream(cfg.seed, 1).generator()
    block = sample_stiefel_uniform(mu.d, K, rng)
    for _ in range(cfg.steps - 1):
        block = _reorthonormalize(ascent_step(a, b, block, cfg.step_size, p), rng)
    return sliced_distance(mu, nu, block, p), block
