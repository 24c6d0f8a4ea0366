"""Discrete probability measures and their one-dimensional projections."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

WEIGHT_TOL = 1e-9
NORM_TOL = 1e-9


class IncompatibleInputs(ValueError):
    """Raised when two inputs disagree on dimension or size."""


class InvalidMeasure(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Weighted point set ``sum_i w_i delta_{x_i}`` in R^d.

    ``supports`` is stored row-major (one row per atom) in float64. When
    ``weights`` is omitted the measure is uniform.
    """

    supports: np.ndarray
    weights: Optional[np.ndarray] = None
    uniform: bool = field(init=False)

    def __post_init__(self):
        x = np.array(self.supports, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2:
            raise InvalidMeasure(f"supports must be a matrix, got shape {x.shape}")
        n = x.shape[0]
        if self.weights is None:
            w = np.full(n, 1.0 / n) if n else np.zeros(0)
        else:
            w = np.array(self.weights, dtype=np.float64).reshape(-1)
        x.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "supports", x)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "uniform", bool(n > 0 and np.all(w == w[0])))
        problem = validate(x, w)
        if problem is not None:
            raise InvalidMeasure(problem)

    @property
    def n(self) -> int:
        return self.supports.shape[0]

    @property
    def d(self) -> int:
        return self.supports.shape[1]

    def shifted(self, offset) -> "EmpiricalMeasure":
        return EmpiricalMeasure(self.supports + np.asarray(offset, dtype=np.float64), self.weights)

    def tobytes(self) -> bytes:
        return self.supports.tobytes() + self.weights.tobytes()


@dataclass(frozen=True, eq=False)
class ProjectedMeasure:
    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if len(self.values) != len(self.weights):
            raise IncompatibleInputs("values and weights differ in length")

    @property
    def uniform(self) -> bool:
        w = self.weights
        return bool(len(w) > 0 and np.all(w == w[0]))


def validate(mu, weights=None) -> Optional[str]:
    """Return a description of the first violated invariant, or None if ok.

    Accepts an :class:`EmpiricalMeasure` or raw ``(supports, weights)``
    arrays, so that candidate data can be checked before construction.
    """
    if isinstance(mu, EmpiricalMeasure):
        x, w = mu.supports, mu.weights
    else:
        x = np.asarray(mu, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        n = x.shape[0]
        w = np.full(n, 1.0 / max(n, 1)) if weights is None else np.asarray(weights, dtype=np.float64)
    if x.ndim != 2:
        return "supports are not a matrix"
    if x.shape[0] < 1:
        return "empty support"
    if x.shape[1] < 1:
        return "zero dimension"
    if w.shape[0] != x.shape[0]:
        return f"{w.shape[0]} weights for {x.shape[0]} supports"
    if not np.all(np.isfinite(x)):
        return "non-finite coordinate"
    if not np.all(np.isfinite(w)):
        return "non-finite weight"
    if np.any(w < 0):
        return "negative weight"
    total = float(w.sum())
    if abs(total - 1.0) > WEIGHT_TOL:
        return f"weights sum {total:.12g}"
    return None


def as_direction(theta) -> np.ndarray:
    """Check that ``theta`` is a unit vector and return it as float64."""
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    norm = np.linalg.norm(theta)
    if not abs(norm - 1.0) <= NORM_TOL:
        raise ValueError(f"direction has norm {norm!r}, expected 1")
    return theta


def project(mu: EmpiricalMeasure, theta) -> ProjectedMeasure:
    """Push ``mu`` forward through ``x -> <theta, x>``."""
    theta = as_direction(theta)
    if theta.shape[0] != mu.d:
        raise IncompatibleInputs(f"direction has dimension {theta.shape[0]}, measure has {mu.d}")
    return ProjectedMeasure(mu.supports @ theta, mu.weights)


def project_many(mu: EmpiricalMeasure, thetas: np.ndarray) -> np.ndarray:
    """Project onto every row of ``thetas``; returns an (n, m) array."""
    thetas = np.atleast_2d(thetas)
    if thetas.shape[1] != mu.d:
        raise IncompatibleInputs(f"directions have dimension {thetas.shape[1]}, measure has {mu.d}")
    return mu.supports @ thetas.T


def check_same_dim(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> None:
    if mu.d != nu.d:
        raise IncompatibleInputs(f"measures live in R^{mu.d} and R^{nu.d}")


# --- CSV point clouds ------------------------------------------------------

def read_csv(path) -> EmpiricalMeasure:
    """Read a point cloud with header ``x1,...,xd[,w]``.

    Raises ``ValueError`` naming the offending row for ragged or
    non-numeric input.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        has_w = bool(header) and header[-1] == "w"
        ncol = len(header)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != ncol:
                raise ValueError(f"{path}: row {lineno} has {len(row)} fields, expected {ncol}")
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise ValueError(f"{path}: row {lineno} is not numeric") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    data = np.array(rows, dtype=np.float64)
    if has_w:
        if ncol < 2:
            raise ValueError(f"{path}: weight column without coordinates")
        return EmpiricalMeasure(data[:, :-1], data[:, -1])
    return EmpiricalMeasure(data)


def write_csv(mu: EmpiricalMeasure, path, with_weights: bool = False) -> None:
    path = Path(path)
    header = [f"x{i + 1}" for i in range(mu.d)]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header + (["w"] if with_weights else []))
        for i in range(mu.n):
            row = [repr(float(v)) for v in mu.supports[i]]
            if with_weights:
                row.append(repr(float(mu.weights[i])))
            w.writerow(row)
