"""Markovian sliced Wasserstein (MSW) estimators.

Each of the ``L`` chains starts from a uniform direction and moves through
``T`` directions under one of four transition kernels:

* ``RandomWalk(kappa)``: vMF centred at the previous direction.
* ``OrthogonalBased()``: uniform on the subsphere orthogonal to the previous direction.
* ``InputAwareDeterministic(eta)``: one projected sub-gradient ascent step on
  ``W_p(theta# mu, theta# nu)``.
* ``InputAwareVmf(eta, kappa)``: vMF centred at that ascent step.

Chain ``l`` (1-based) draws from ``RngStream(seed, l)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .gradients import canonical_pair
from .max_sw import ascent_step
from .measure import EmpiricalMeasure, check_same_dim
from .sphere import (ParallelDirections, RngStream, VmfParams, project_orthocomplement,
                     retract_to_sphere, sample_uniform_sphere, sample_vmf)
from .sw import projected_pth_powers


class InvalidConfig(ValueError):
    pass


@dataclass(frozen=True)
class RandomWalk:
    kappa: float = 50.0

    def __post_init__(self):
        if not self.kappa >= 0:
            raise InvalidConfig(f"kappa must be >= 0, got {self.kappa}")


@dataclass(frozen=True)
class OrthogonalBased:
    pass


@dataclass(frozen=True)
class InputAwareDeterministic:
    eta: float = 0.1

    def __post_init__(self):
        if not self.eta > 0:
            raise InvalidConfig(f"eta must be > 0, got {self.eta}")


@dataclass(frozen=True)
class InputAwareVmf:
    eta: float = 0.1
    kappa: float = 50.0

    def __post_init__(self):
        if not self.eta > 0:
            raise InvalidConfig(f"eta must be > 0, got {self.eta}")
        if not self.kappa >= 0:
            raise InvalidConfig(f"kappa must be >= 0, got {self.kappa}")


TransitionKind = Union[RandomWalk, OrthogonalBased, InputAwareDeterministic, InputAwareVmf]


def is_input_aware(kind: TransitionKind) -> bool:
    return isinstance(kind, (InputAwareDeterministic, InputAwareVmf))


def kept_mask(T: int, burn: int = 0, thin: int = 1) -> np.ndarray:
    """Step ``t`` (1-based) is kept iff ``t > burn`` and ``t % thin == 0``."""
    t = np.arange(1, T + 1)
    return (t > burn) & (t % thin == 0)


@dataclass(frozen=True)
class MswConfig:
    L: int = 2
    T: int = 5
    p: float = 2.0
    transition: TransitionKind = field(default_factory=InputAwareDeterministic)
    burn: int = 0
    thin: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.L < 1 or self.T < 1:
            raise InvalidConfig(f"need L >= 1 and T >= 1, got L={self.L}, T={self.T}")
        if not self.p >= 1:
            raise InvalidConfig(f"order p must be >= 1, got {self.p}")
        if self.burn < 0 or self.thin < 1:
            raise InvalidConfig(f"need M >= 0 and N >= 1, got M={self.burn}, N={self.thin}")
        if self.burn >= self.T:
            raise InvalidConfig(f"burn-in M={self.burn} must be < T={self.T}")
        if not kept_mask(self.T, self.burn, self.thin).any():
            raise InvalidConfig(f"no step survives burn-in M={self.burn} and thinning N={self.thin} with T={self.T}")

    @property
    def kept(self) -> np.ndarray:
        return kept_mask(self.T, self.burn, self.thin)


@dataclass(frozen=True, eq=False)
class DirectionChain:
    directions: np.ndarray  # (T, d)
    kept: np.ndarray  # (T,) bool


def _orthogonal_step(prev: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    while True:
        try:
            return project_orthocomplement(sample_uniform_sphere(prev.shape[0], rng), prev)
        except ParallelDirections:
            continue


def sample_chain(mu: Optional[EmpiricalMeasure], nu: Optional[EmpiricalMeasure], cfg: MswConfig,
                 chain_id: int, d: Optional[int] = None) -> DirectionChain:
    """Simulate one chain of ``cfg.T`` directions.

    ``mu`` and ``nu`` may be omitted (pass ``d``) for the measure-independent
    kernels, which lets one direction set be shared across many pairs.
    """
    kind = cfg.transition
    if mu is not None and nu is not None:
        check_same_dim(mu, nu)
        d = mu.d
    elif is_input_aware(kind):
        raise InvalidConfig("input-aware transitions need both measures")
    if d is None:
        raise InvalidConfig("dimension unknown: pass measures or d")
    if isinstance(kind, (RandomWalk, InputAwareVmf)) and d < 2 and kind.kappa > 0:
        raise InvalidConfig("vMF transitions need d >= 2")
    if is_input_aware(kind):
        a, b = canonical_pair(mu, nu)

    rng = RngStream(cfg.seed, chain_id).generator()
    out = np.empty((cfg.T, d))
    theta = sample_uniform_sphere(d, rng)
    out[0] = theta
    for t in range(1, cfg.T):
        if isinstance(kind, RandomWalk):
            theta = sample_vmf(VmfParams(theta, kind.kappa), rng)
        elif isinstance(kind, OrthogonalBased):
            theta = _orthogonal_step(theta, rng)
        else:
            moved = retract_to_sphere(ascent_step(a, b, theta[None, :], kind.eta, cfg.p)[0])
            if isinstance(kind, InputAwareVmf):
                theta = sample_vmf(VmfParams(moved, kind.kappa), rng)
            else:
                theta = moved
        out[t] = theta
    return DirectionChain(out, cfg.kept)


def sample_chains(mu, nu, cfg: MswConfig, d: Optional[int] = None) -> list[DirectionChain]:
    return [sample_chain(mu, nu, cfg, l, d=d) for l in range(1, cfg.L + 1)]


def chain_directions(mu, nu, cfg: MswConfig, kept_only: bool = True, d: Optional[int] = None) -> np.ndarray:
    """All (or only the kept) directions of the ``L`` chains, stacked chain by chain."""
    chains = sample_chains(mu, nu, cfg, d=d)
    if kept_only:
        return np.concatenate([c.directions[c.kept] for c in chains], axis=0)
    return np.concatenate([c.directions for c in chains], axis=0)


def _estimate(mu, nu, thetas, p) -> float:
    return float(np.mean(projected_pth_powers(mu, nu, thetas, p))) ** (1.0 / p)


def msw_estimate(mu: EmpiricalMeasure, nu: EmpiricalMeasure, cfg: MswConfig) -> float:
    """``((1/(LT)) sum_{l,t} W_p^p(theta_lt# mu, theta_lt# nu))^(1/p)``."""
    if cfg.burn != 0 or cfg.thin != 1:
        raise InvalidConfig("msw_estimate uses every step; use msw_estimate_burn_thin for M > 0 or N > 1")
    return _estimate(mu, nu, chain_directions(mu, nu, cfg, kept_only=False), cfg.p)


def msw_estimate_burn_thin(mu: EmpiricalMeasure, nu: EmpiricalMeasure, cfg: MswConfig) -> float:
    """Burned and thinned MSW.

    All ``T`` steps are simulated; only kept steps enter the average, which is
    normalized by the number of kept directions.
    """
    return _estimate(mu, nu, chain_directions(mu, nu, cfg, kept_only=True), cfg.p)


def msw_from_directions(mu, nu, thetas, p: float = 2.0) -> float:
    """MSW value on a pre-sampled direction set (shared across pairs)."""
    return _estimate(mu, nu, thetas, p)


def estimator_variance_report(mu, nu, cfg: MswConfig, seeds: int,
                              L_grid: Sequence[int] = (10, 40, 160), estimator=None):
    """Mean and standard deviation of an estimator over ``seeds`` seeds per ``L``.

    ``estimator(mu, nu, cfg)`` defaults to :func:`msw_estimate_burn_thin`;
    seeds run ``cfg.seed, cfg.seed + 1, ...``. Returns ``[(L, mean, std), ...]``.
    """
    if seeds < 2:
        raise ValueError("need at least two seeds")
    estimator = estimator or msw_estimate_burn_thin
    rows = []
    for L in L_grid:
        vals = np.array([estimator(mu, nu, replace(cfg, L=L, seed=cfg.seed + s)) for s in range(seeds)])
        rows.append((int(L), float(vals.mean()), float(vals.std(ddof=1))))
    return rows


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log ys`` against ``log xs``."""
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])
