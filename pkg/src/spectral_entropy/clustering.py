"""k-means with k-means++ seeding, spectral clustering and label alignment.

The clustering step needs a (1+eps)-approximate k-means solution. We get
there the usual practical way: k-means++ seeding (O(log K)-competitive in
expectation) followed by Lloyd iterations, repeated over several restarts and
keeping the cheapest run. ``eps`` is therefore not a direct knob; increase
``restarts`` to tighten the approximation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .assignment import ClusterAssignment
from .graph import spectral_embedding

__all__ = [
    "ClusterAssignment",
    "KMeansResult",
    "SpectralConfig",
    "align_labels",
    "kmeans",
    "kmeans_cost",
    "miscluster_error",
    "spectral_cluster",
]

MAX_ITER = 300


@dataclass
class KMeansResult:
    assignment: ClusterAssignment
    centers: np.ndarray
    cost: float
    restarts_used: int
    iterations: int = 0


def _sq_dists(X, C):
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)


def kmeans_cost(X, labels, centers) -> float:
    X = np.asarray(X, dtype=float)
    return float(((X - centers[labels]) ** 2).sum())


def _restart_rng(seed, index):
    return np.random.default_rng([seed, index])


def kmeans_pp_init(X: np.ndarray, K: int, rng) -> np.ndarray:
    """k-means++ seeding by D^2 sampling.

    When every remaining point coincides with a chosen center the lowest-index
    point is taken.
    """
    n = X.shape[0]
    idx = [int(rng.integers(n))]
    d2 = ((X - X[idx[0]]) ** 2).sum(axis=1)
    for _ in range(1, K):
        total = d2.sum()
        if total <= 0:
            nxt = int(np.flatnonzero(~np.isin(np.arange(n), idx))[0])
        else:
            cum = np.cumsum(d2)
            nxt = int(np.searchsorted(cum, rng.random() * total, side="right"))
            nxt = min(nxt, n - 1)
        idx.append(nxt)
        d2 = np.minimum(d2, ((X - X[nxt]) ** 2).sum(axis=1))
    return X[idx].copy()


def lloyd(X: np.ndarray, centers: np.ndarray, max_iter: int = MAX_ITER, history: list | None = None):
    """Lloyd iterations until the assignment stops changing.

    Empty clusters are reseeded at the point farthest from its current center.
    ``history``, when given, receives the cost after every assignment step.
    """
    K = centers.shape[0]
    labels = np.argmin(_sq_dists(X, centers), axis=1)
    it = 0
    for it in range(1, max_iter + 1):
        if history is not None:
            history.append(kmeans_cost(X, labels, centers))
        counts = np.bincount(labels, minlength=K)
        for j in np.flatnonzero(counts == 0):
            d = ((X - centers[labels]) ** 2).sum(axis=1)
            d[counts[labels] < 2] = -1.0  # never empty another cluster
            far = int(np.argmax(d))
            labels[far] = j
            counts = np.bincount(labels, minlength=K)
        centers = np.stack([X[labels == j].mean(axis=0) for j in range(K)])
        new = np.argmin(_sq_dists(X, centers), axis=1)
        if np.array_equal(new, labels):
            break
        labels = new
    return labels, centers, it


def kmeans(points, K: int, restarts: int = 10, seed=0, max_iter: int = MAX_ITER) -> KMeansResult:
    """Best of ``restarts`` k-means++/Lloyd runs.

    Restart ``r`` draws from its own generator seeded by ``(seed, r)``, so a
    run with more restarts sees the same first restarts as a shorter one. Ties
    in cost go to the lowest restart index.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if n == 0:
        raise ValueError("no points to cluster")
    if K < 1:
        raise ValueError(f"K must be positive, got {K}")
    if K > n:
        raise ValueError(f"K={K} exceeds the number of points ({n})")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % 2**63)

    best = None
    for r in range(restarts):
        rng = _restart_rng(seed, r)
        labels, centers, iters = lloyd(X, kmeans_pp_init(X, K, rng), max_iter)
        cost = kmeans_cost(X, labels, centers)
        if best is None or cost < best[0]:
            best = (cost, labels, centers, iters)
    cost, labels, centers, iters = best
    return KMeansResult(ClusterAssignment(labels, K), centers, cost, restarts, iters)


@dataclass(frozen=True)
class SpectralConfig:
    variant: str = "unnormalized"
    restarts: int = 10
    seed: int = 0
    max_iter: int = MAX_ITER


def spectral_cluster(E, K: int, config: SpectralConfig | None = None, *, weighted: bool = False) -> ClusterAssignment:
    """Cluster the nodes of ``E`` into ``K`` groups via a spectral embedding and k-means."""
    config = config or SpectralConfig()
    n = np.asarray(E).shape[0]
    if not 1 <= K <= n:
        raise ValueError(f"K must satisfy 1 <= K <= n={n}, got {K}")
    if K == 1:
        return ClusterAssignment(np.zeros(n, dtype=np.int64), 1)
    emb = spectral_embedding(E, K, config.variant, weighted=weighted)
    return kmeans(emb.vectors, K, config.restarts, config.seed, config.max_iter).assignment


def _check_pair(pred: ClusterAssignment, truth: ClusterAssignment):
    if pred.n != truth.n:
        raise ValueError(f"assignments cover different item counts ({pred.n} vs {truth.n})")
    if pred.K != truth.K:
        raise ValueError(f"assignments have different K ({pred.K} vs {truth.K})")


def confusion_matrix(pred: ClusterAssignment, truth: ClusterAssignment) -> np.ndarray:
    """``C[a, b]`` = number of items with predicted label a and true label b."""
    C = np.zeros((pred.K, truth.K), dtype=np.int64)
    np.add.at(C, (pred.labels, truth.labels), 1)
    return C


def align_labels(pred: ClusterAssignment, truth: ClusterAssignment) -> np.ndarray:
    """Permutation ``perm`` mapping predicted label ``a`` to true label ``perm[a]``.

    Maximizes agreement on the confusion matrix (Hungarian algorithm), which
    is the same as minimizing one-hot disagreements.
    """
    _check_pair(pred, truth)
    C = confusion_matrix(pred, truth)
    rows, cols = linear_sum_assignment(C, maximize=True)
    perm = np.empty(pred.K, dtype=np.int64)
    perm[rows] = cols
    return perm


def miscluster_error(pred: ClusterAssignment, truth: ClusterAssignment, aligned: bool = True) -> int:
    """Number of one-hot entries where ``pred`` and ``truth`` disagree.

    Each misplaced item contributes 2. With ``aligned`` (the default) the
    predicted labels are first permuted to best match the truth; without it
    the raw labels are compared.
    """
    _check_pair(pred, truth)
    if aligned:
        pred = pred.relabel(align_labels(pred, truth))
    return 2 * int(np.count_nonzero(pred.labels != truth.labels))
