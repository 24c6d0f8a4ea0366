"""Directions on the unit sphere: samplers and small linear-algebra helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measure import as_direction

MAX_REJECTIONS = 10**6
DEGENERATE_TOL = 1e-12


class InvalidDimension(ValueError):
    pass


class InvalidParameter(ValueError):
    pass


class DegenerateInput(ArithmeticError):
    """Vectors are (numerically) zero or linearly dependent."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class ParallelDirections(DegenerateInput):
    """Signal that a fresh draw is needed: the candidate is parallel to the pivot."""


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by ``(seed, stream_id)``.

    Streams with the same pair produce identical draws on every platform
    (PCG64 seeded through ``SeedSequence``); distinct ``stream_id`` values
    give statistically independent streams.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministically mix ``keys`` into ``seed`` (used for per-step substreams)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class VmfParams:
    location: np.ndarray
    concentration: float

    def __post_init__(self):
        object.__setattr__(self, "location", as_direction(self.location))
        if not self.concentration >= 0:
            raise InvalidParameter(f"concentration must be >= 0, got {self.concentration!r}")


def sample_uniform_sphere(d: int, rng: np.random.Generator) -> np.ndarray:
    if d < 1:
        raise InvalidDimension(f"dimension must be >= 1, got {d}")
    while True:
        g = rng.standard_normal(d)
        norm = np.linalg.norm(g)
        if norm > 0:
            return g / norm


def _beta(alpha: float, rng: np.random.Generator) -> float:
    # symmetric Beta(alpha, alpha) as a ratio of two gamma draws
    x = rng.standard_gamma(alpha)
    y = rng.standard_gamma(alpha)
    return x / (x + y)


def sample_vmf(params: VmfParams, rng: np.random.Generator) -> np.ndarray:
    """Draw one direction from vMF(location, concentration) by rejection.

    Wood's scheme: the cosine ``w`` to the mean is drawn with a Beta
    proposal and accepted against the envelope, the remaining mass is
    spread uniformly over the orthogonal subsphere, and a Householder
    reflection maps ``e_1`` onto the location.
    """
    eps = params.location
    kappa = float(params.concentration)
    d = eps.shape[0]
    if d < 2:
        raise InvalidDimension("vMF sampling needs d >= 2")
    if kappa == 0.0:
        return sample_uniform_sphere(d, rng)

    v = sample_uniform_sphere(d - 1, rng)
    dm1 = d - 1.0
    root = math.sqrt(4.0 * kappa * kappa + dm1 * dm1)
    # equals (-2k + root)/(d-1) without the cancellation at large kappa
    b = dm1 / (2.0 * kappa + root)
    a = (dm1 + 2.0 * kappa + root) / 4.0
    m = 4.0 * a * b / (1.0 + b) - dm1 * math.log(dm1)
    for _ in range(MAX_REJECTIONS):
        psi = _beta(dm1 / 2.0, rng)
        denom = 1.0 - (1.0 - b) * psi
        omega = (1.0 - (1.0 + b) * psi) / denom
        t = 2.0 * a * b / denom
        u = rng.random()
        if u == 0.0 or dm1 * math.log(t) - t + m >= math.log(u):
            break
    else:
        raise RuntimeError(f"vMF rejection loop exceeded {MAX_REJECTIONS} iterations (kappa={kappa}, d={d})")

    h1 = np.empty(d)
    h1[0] = omega
    h1[1:] = math.sqrt(max(0.0, 1.0 - omega * omega)) * v
    e1_minus = -eps.copy()
    e1_minus[0] += 1.0
    nrm = np.linalg.norm(e1_minus)
    if nrm < DEGENERATE_TOL:
        return h1
    u_vec = e1_minus / nrm
    return h1 - 2.0 * u_vec * (u_vec @ h1)


def gram_schmidt(vectors) -> np.ndarray:
    """Orthonormalize the rows of ``vectors`` in order.

    Raises :class:`DegenerateInput` if a residual falls below 1e-12, which
    also covers ``K > d``.
    """
    q = np.array(vectors, dtype=np.float64)
    if q.ndim == 1:
        q = q[None, :]
    for k in range(q.shape[0]):
        for i in range(k):
            q[k] = q[k] - (q[i] @ q[k]) / (q[i] @ q[i]) * q[i]
        norm = np.linalg.norm(q[k])
        if not norm >= DEGENERATE_TOL:
            raise DegenerateInput(f"vector {k} is linearly dependent on its predecessors", index=k)
        q[k] = q[k] / norm
    return q


def sample_stiefel_uniform(d: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """``k`` orthonormal rows, uniform on the Stiefel manifold V_k(R^d)."""
    if d < 1:
        raise InvalidDimension(f"dimension must be >= 1, got {d}")
    if not 1 <= k <= d:
        raise InvalidParameter(f"need 1 <= K <= d, got K={k}, d={d}")
    while True:
        g = rng.standard_normal((k, d))
        try:
            return gram_schmidt(g)
        except DegenerateInput:
            continue


def project_orthocomplement(theta_new, theta_prev) -> np.ndarray:
    """Project ``theta_new`` onto the great subsphere orthogonal to ``theta_prev``."""
    theta_new = np.asarray(theta_new, dtype=np.float64)
    theta_prev = np.asarray(theta_prev, dtype=np.float64)
    r = theta_new - (theta_prev @ theta_new) / (theta_prev @ theta_prev) * theta_prev
    norm = np.linalg.norm(r)
    if not norm >= DEGENERATE_TOL:
        raise ParallelDirections("candidate is parallel to the previous direction")
    return r / norm


def retract_to_sphere(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    norm = np.linalg.norm(v)
    if not norm > 0:
        raise DegenerateInput("cannot normalize a zero vector")
    return v / norm
