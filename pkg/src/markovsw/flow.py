"""Euler-scheme gradient flows of point clouds under sliced distances.

Each step re-estimates the distance with fresh directions and applies
``X <- X - n * step_size * grad_X D(P_X, P_Y)``.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .distances import DistanceSpec
from .exact_ot import exact_wasserstein
from .gradients import value_and_grad_supports
from .measure import EmpiricalMeasure
from .sphere import derive_seed

DIVERGENCE_BOUND = 1e6


class FlowDivergence(ArithmeticError):
    def __init__(self, step: int, message: str):
        super().__init__(f"flow diverged at step {step}: {message}")
        self.step = step


@dataclass(frozen=True)
class FlowConfig:
    steps: int = 300
    step_size: float = 1e-3
    distance: DistanceSpec = field(default_factory=lambda: DistanceSpec("msw-i", L=2, T=5, eta=0.1))
    score_every: int = 10
    seed: int = 0

    def __post_init__(self):
        # steps == 0 is accepted: the trace then holds the initial state only
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if not self.step_size >= 0 or not np.isfinite(self.step_size):
            raise ValueError(f"step_size must be finite and >= 0, got {self.step_size}")
        if self.score_every < 1:
            raise ValueError(f"score_every must be >= 1, got {self.score_every}")
        if not self.distance.sliced:
            raise ValueError("flows need a sliced distance (the exact distance has no support gradient here)")


@dataclass
class TraceRow:
    step: int
    loss: float
    w2: float
    seconds: float


@dataclass
class FlowTrace:
    rows: list[TraceRow]
    final: EmpiricalMeasure

    @property
    def w2(self) -> np.ndarray:
        return np.array([r.w2 for r in self.rows])

    @property
    def steps(self) -> np.ndarray:
        return np.array([r.step for r in self.rows])

    def write_csv(self, path, clock: bool = True) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["step", "loss", "w2", "seconds"])
            for r in self.rows:
                w.writerow([r.step, repr(r.loss), repr(r.w2), f"{r.seconds if clock else 0.0:.3f}"])


def run_flow(source: EmpiricalMeasure, target: EmpiricalMeasure, cfg: FlowConfig) -> FlowTrace:
    """Flow ``source`` toward ``target``; log every ``score_every`` steps and the last one.

    Each logged row holds the estimator value at the current cloud, its exact
    W2 to the target and the cumulative time spent in update steps (scoring
    is excluded from the clock).
    """
    spec = cfg.distance
    x = source.supports.copy()
    n = x.shape[0]
    rows: list[TraceRow] = []
    elapsed = 0.0

    def log(step: int):
        cur = EmpiricalMeasure(x, source.weights)
        loss = spec.evaluate(cur, target, derive_seed(cfg.seed, step + 1))
        rows.append(TraceRow(step, loss, exact_wasserstein(cur, target, 2.0), elapsed))

    log(0)
    for step in range(1, cfg.steps + 1):
        start = time.perf_counter()
        cur = EmpiricalMeasure(x, source.weights)
        thetas = spec.directions(cur, target, derive_seed(cfg.seed, step))
        _, grad = value_and_grad_supports(cur, target, thetas, spec.p)
        x = x - n * cfg.step_size * grad
        elapsed += time.perf_counter() - start
        if not np.all(np.isfinite(x)):
            raise FlowDivergence(step, "non-finite coordinate")
        if np.max(np.abs(x)) > DIVERGENCE_BOUND:
            raise FlowDivergence(step, f"coordinate magnitude above {DIVERGENCE_BOUND:g}")
        if step % cfg.score_every == 0 or step == cfg.steps:
            log(step)
    return FlowTrace(rows, EmpiricalMeasure(x, source.weights))


# --- fixtures ---------------------------------------------------------------

def s_curve(t) -> np.ndarray:
    """Points of the planar S-curve for parameters ``t`` in [-3pi/2, 3pi/2]."""
    t = np.asarray(t, dtype=np.float64)
    return np.stack([np.sin(t), np.sign(t) * (np.cos(t) - 1.0)], axis=-1)


def make_s_shape(n: int, noise: float = 0.05, seed: int = 0, return_params: bool = False):
    """``n`` points along the S-curve with isotropic Gaussian jitter of scale ``noise``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    t = 3.0 * np.pi * (rng.random(n) - 0.5)
    pts = s_curve(t) + noise * rng.standard_normal((n, 2))
    mu = EmpiricalMeasure(pts)
    return (mu, t) if return_params else mu


def make_gaussian(n: int, d: int = 2, mean=0.0, scale: float = 1.0, seed: int = 0) -> EmpiricalMeasure:
    rng = np.random.default_rng(seed)
    return EmpiricalMeasure(np.asarray(mean, dtype=np.float64) + scale * rng.standard_normal((n, d)))


def make_gaussian_mixture(n: int, centers=((-1.5, 1.0), (1.5, 1.0), (0.0, -1.5)), scale: float = 0.3,
                          seed: int = 0) -> EmpiricalMeasure:
    """Stand-in for a multi-coloured blob start distribution."""
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=np.float64)
    which = rng.integers(0, len(centers), size=n)
    return EmpiricalMeasure(centers[which] + scale * rng.standard_normal((n, centers.shape[1])))
