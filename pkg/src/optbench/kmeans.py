"""Small Lloyd's k-means with k-means++ seeding, used for population transfer."""

from __future__ import annotations

import numpy as np


def _sq_dists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = [points[int(rng.integers(n))]]
    for _ in range(1, k):
        d2 = _sq_dists(points, np.array(centers)).min(axis=1)
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers.append(points[idx])
    return np.array(centers, dtype=float)


def _fill_empty(points: np.ndarray, labels: np.ndarray, centers: np.ndarray) -> None:
    """Give every empty cluster the point farthest from its current center."""
    k = centers.shape[0]
    for c in range(k):
        if np.any(labels == c):
            continue
        counts = np.bincount(labels, minlength=k)
        movable = counts[labels] > 1
        d2 = ((points - centers[labels]) ** 2).sum(axis=1)
        d2 = np.where(movable, d2, -1.0)
        idx = int(np.argmax(d2))
        labels[idx] = c
        centers[c] = points[idx]


def sse(points: np.ndarray, labels: np.ndarray) -> float:
    """Within-cluster sum of squared distances to the cluster means."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    total = 0.0
    for c in np.unique(labels):
        members = points[labels == c]
        total += float(((members - members.mean(axis=0)) ** 2).sum())
    return total


def kmeans(
    points: np.ndarray,
    k: int,
    rng: np.random.Generator,
    max_iters: int = 100,
    n_init: int = 1,
) -> np.ndarray:
    """Cluster labels in ``0..k-1``; every cluster is nonempty.

    With ``n_init > 1`` the lowest-SSE labelling over several seedings wins.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must lie in 1..{n} (number of points)")
    best_labels, best_sse = None, np.inf
    for _ in range(n_init):
        labels = _lloyd(points, k, rng, max_iters)
        score = sse(points, labels)
        if score < best_sse:
            best_labels, best_sse = labels, score
    return best_labels


def _lloyd(points: np.ndarray, k: int, rng: np.random.Generator, max_iters: int) -> np.ndarray:
    centers = kmeans_pp_init(points, k, rng)
    labels = np.full(points.shape[0], -1)
    for _ in range(max_iters):
        new = np.argmin(_sq_dists(points, centers), axis=1)
        _fill_empty(points, new, centers)
        if np.array_equal(new, labels):
            break
        labels = new
        for c in range(k):
            centers[c] = points[labels == c].mean(axis=0)
    return labels
