"""Analytic subgradients of projected Wasserstein distances.

Both gradients freeze the sorting permutation of the projections (the 1D
optimal coupling). Away from ties that coupling is locally constant, so the
frozen-coupling derivative is the exact gradient; at ties it is one valid
subgradient, with ties broken by stable sort.
"""

from __future__ import annotations

import numpy as np

from .measure import EmpiricalMeasure, check_same_dim

ZERO_DISTANCE = 1e-12


class UnsupportedConfiguration(ValueError):
    pass


def _require_matched(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> None:
    check_same_dim(mu, nu)
    if mu.n != nu.n or not (mu.uniform and nu.uniform):
        raise UnsupportedConfiguration("gradients need uniform measures of equal size")


def canonical_pair(mu: EmpiricalMeasure, nu: EmpiricalMeasure):
    """Order a pair of measures by their byte serialization.

    Gradient-driven direction chains evaluated on the canonical pair are
    bitwise identical for ``(mu, nu)`` and ``(nu, mu)``.
    """
    return (nu, mu) if nu.tobytes() < mu.tobytes() else (mu, nu)


def _matched_gaps(mu, nu, thetas):
    """Sorted-matching gaps and the sort orders, one column per direction."""
    px = mu.supports @ thetas.T
    py = nu.supports @ thetas.T
    ix = np.argsort(px, axis=0, kind="stable")
    iy = np.argsort(py, axis=0, kind="stable")
    gaps = np.take_along_axis(px, ix, axis=0) - np.take_along_axis(py, iy, axis=0)
    return gaps, ix, iy


def _dpower(gaps: np.ndarray, p: float) -> np.ndarray:
    # d/ds |s|^p
    if p == 1:
        return np.sign(gaps)
    return p * np.sign(gaps) * np.abs(gaps) ** (p - 1)


def grad_directions(mu: EmpiricalMeasure, nu: EmpiricalMeasure, thetas, p: float = 2.0):
    """Gradients of ``W_p(theta# mu, theta# nu)`` for each row ``theta`` of ``thetas``.

    Returns ``(distances, grads)`` with shapes ``(m,)`` and ``(m, d)``. Rows
    whose distance is below 1e-12 get a zero gradient.
    """
    _require_matched(mu, nu)
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    n, m = mu.n, thetas.shape[0]
    gaps, ix, iy = _matched_gaps(mu, nu, thetas)
    wpp = np.mean(np.abs(np.ascontiguousarray(gaps.T)) ** p, axis=1)
    dist = wpp ** (1.0 / p)
    coef = _dpower(gaps, p) / n
    # sum_k coef_k (x_{ix_k} - y_{iy_k}) == X^T a - Y^T b with coef scattered back
    a = np.zeros((n, m))
    b = np.zeros((n, m))
    np.put_along_axis(a, ix, coef, axis=0)
    np.put_along_axis(b, iy, coef, axis=0)
    grad_pow = (mu.supports.T @ a - nu.supports.T @ b).T
    live = dist >= ZERO_DISTANCE
    scale = np.zeros(m)
    scale[live] = dist[live] ** (1.0 - p) / p
    return dist, grad_pow * scale[:, None]


def grad_direction(mu: EmpiricalMeasure, nu: EmpiricalMeasure, theta, p: float = 2.0) -> np.ndarray:
    """Gradient in ``theta`` of ``W_p(theta# mu, theta# nu)``."""
    _, g = grad_directions(mu, nu, np.asarray(theta, dtype=np.float64)[None, :], p)
    return g[0]


def value_and_grad_supports(mu: EmpiricalMeasure, nu: EmpiricalMeasure, thetas, p: float = 2.0):
    """Sliced distance over a fixed direction set and its gradient in ``mu.supports``.

    The distance is ``D = (mean_j W_p^p(theta_j# mu, theta_j# nu))^(1/p)``.
    Returns ``(D, grad)`` where ``grad`` has the shape of ``mu.supports``;
    the gradient is zero when ``D < 1e-12``.
    """
    _require_matched(mu, nu)
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    if thetas.shape[0] == 0:
        raise ValueError("direction set is empty")
    n, m = mu.n, thetas.shape[0]
    gaps, ix, _ = _matched_gaps(mu, nu, thetas)
    wpp = np.mean(np.abs(np.ascontiguousarray(gaps.T)) ** p, axis=1)
    dist = float(np.mean(wpp)) ** (1.0 / p)
    if dist < ZERO_DISTANCE:
        return dist, np.zeros_like(mu.supports)
    coef = np.zeros((n, m))
    np.put_along_axis(coef, ix, _dpower(gaps, p), axis=0)
    grad_pow = coef @ thetas / (m * n)
    return dist, grad_pow * (dist ** (1.0 - p) / p)


def grad_supports(mu: EmpiricalMeasure, nu: EmpiricalMeasure, thetas, p: float = 2.0) -> np.ndarray:
    return value_and_grad_supports(mu, nu, thetas, p)[1]
