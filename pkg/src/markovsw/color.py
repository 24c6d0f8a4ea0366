"""Palette-based color transfer.

Both images are quantized with k-means; the source palette is then flowed
toward the target palette as a uniform point cloud in RGB space, rounded
back to 8-bit values, and every pixel takes the new color of its cluster.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .exact_ot import exact_wasserstein
from .flow import FlowConfig, FlowTrace, run_flow
from .measure import EmpiricalMeasure

_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class Palette:
    centers: np.ndarray  # (k, 3) in [0, 255]
    counts: np.ndarray  # (k,) pixels per cluster

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    def as_measure(self, weighted: bool = False) -> EmpiricalMeasure:
        if weighted:
            return EmpiricalMeasure(self.centers, self.counts / self.counts.sum())
        return EmpiricalMeasure(self.centers)


@dataclass(frozen=True, eq=False)
class IndexedImage:
    width: int
    height: int
    index: np.ndarray  # (height, width) cluster ids

    def render(self, colors: np.ndarray) -> np.ndarray:
        return np.asarray(colors)[self.index]


def load_image(path) -> np.ndarray:
    """Read an image as an (h, w, 3) uint8 RGB array; alpha is dropped."""
    with Image.open(Path(path)) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()


def save_image(pixels: np.ndarray, path) -> None:
    Image.fromarray(np.asarray(pixels, dtype=np.uint8), mode="RGB").save(Path(path), format="PNG")


def _nearest(points: np.ndarray, centers: np.ndarray):
    """Index of and squared distance to the nearest center, computed in chunks."""
    labels = np.empty(len(points), dtype=np.int64)
    dist = np.empty(len(points))
    cc = np.einsum("ij,ij->i", centers, centers)
    for s in range(0, len(points), _CHUNK):
        blk = points[s:s + _CHUNK]
        d2 = np.einsum("ij,ij->i", blk, blk)[:, None] - 2.0 * blk @ centers.T + cc[None, :]
        lab = np.argmin(d2, axis=1)
        labels[s:s + _CHUNK] = lab
        diff = blk - centers[lab]
        dist[s:s + _CHUNK] = np.einsum("ij,ij->i", diff, diff)
    return labels, dist


def kmeans(points: np.ndarray, weights: np.ndarray, k: int, iters: int, rng: np.random.Generator):
    """Weighted Lloyd's algorithm with k-means++ seeding.

    Returns ``(centers, labels, history)`` where ``history[i]`` is the
    weighted within-cluster sum of squares after iteration ``i`` (index 0 is
    the seeding). An empty cluster is moved to the point currently farthest
    from its center.
    """
    n = len(points)
    centers = np.empty((k, points.shape[1]))
    first = rng.choice(n, p=weights / weights.sum())
    centers[0] = points[first]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        prob = weights * d2
        total = prob.sum()
        idx = rng.choice(n, p=prob / total) if total > 0 else rng.integers(n)
        centers[j] = points[idx]
        d2 = np.minimum(d2, np.sum((points - centers[j]) ** 2, axis=1))

    labels, dist = _nearest(points, centers)
    history = [float(weights @ dist)]
    for _ in range(iters):
        mass = np.bincount(labels, weights=weights, minlength=k)
        sums = np.zeros_like(centers)
        np.add.at(sums, labels, weights[:, None] * points)
        live = mass > 0
        centers[live] = sums[live] / mass[live, None]
        labels, dist = _nearest(points, centers)
        for j in np.flatnonzero(~live):
            far = int(np.argmax(dist))
            centers[j] = points[far]
            labels[far] = j
            dist[far] = 0.0
        history.append(float(weights @ dist))
    return centers, labels, history


def extract_palette(image: np.ndarray, k: int = 512, iters: int = 10, seed: int = 0,
                    return_history: bool = False):
    """Quantize ``image`` to ``k`` colors.

    k-means runs on the distinct colors weighted by pixel count, which is
    equivalent to clustering every pixel. ``k`` above the number of
    distinct colors is clamped with a warning.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    image = np.asarray(image)
    h, w = image.shape[:2]
    flat = image.reshape(-1, 3).astype(np.float64)
    colors, inverse, counts = np.unique(flat, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    if k > len(colors):
        warnings.warn(f"k={k} exceeds the {len(colors)} distinct colors; using k={len(colors)}", stacklevel=2)
        k = len(colors)
    centers, labels, history = kmeans(colors, counts.astype(np.float64), k, iters, np.random.default_rng(seed))
    centers = np.clip(centers, 0.0, 255.0)
    pix_labels = labels[inverse]
    palette = Palette(centers, np.bincount(pix_labels, minlength=k))
    indexed = IndexedImage(w, h, pix_labels.reshape(h, w))
    if return_history:
        return palette, indexed, history
    return palette, indexed


def round_palette(x: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(x), 0, 255).astype(np.uint8)


@dataclass
class TransferResult:
    image: np.ndarray
    source_palette: Palette
    target_palette: Palette
    transferred: np.ndarray  # (k, 3) uint8
    w2_before: float
    w2_after: float
    trace: FlowTrace


def transfer_colors(source: np.ndarray, target: np.ndarray, k: int = 512, flow: FlowConfig | None = None,
                    seed: int = 0, kmeans_iters: int = 10) -> TransferResult:
    """Transfer the colors of ``target`` onto ``source``.

    ``w2_before`` and ``w2_after`` are exact W2 distances from the source
    palette and from the rounded transferred palette to the target palette.
    """
    flow = flow or FlowConfig(steps=2000, step_size=1e-3)
    src_pal, src_idx = extract_palette(source, k, kmeans_iters, seed)
    tgt_pal, _ = extract_palette(target, k, kmeans_iters, seed + 1)
    if src_pal.k != tgt_pal.k:
        # equal-size palettes are required by the flow; shrink the larger one
        k = min(src_pal.k, tgt_pal.k)
        src_pal, src_idx = extract_palette(source, k, kmeans_iters, seed)
        tgt_pal, _ = extract_palette(target, k, kmeans_iters, seed + 1)
    mu, nu = src_pal.as_measure(), tgt_pal.as_measure()
    trace = run_flow(mu, nu, flow)
    moved = round_palette(trace.final.supports)
    out = src_idx.render(moved)
    return TransferResult(
        image=out,
        source_palette=src_pal,
        target_palette=tgt_pal,
        transferred=moved,
        w2_before=exact_wasserstein(mu, nu, 2.0),
        w2_after=exact_wasserstein(EmpiricalMeasure(moved.astype(np.float64)), nu, 2.0),
        trace=trace,
    )
