"""Choosing the number of clusters by holding out node pairs.

For every fold the held-out entries are replaced by the observed edge density
of the training pairs, the imputed matrix is clustered into K blocks, block
edge probabilities are estimated from training pairs only, and the held-out
entries are scored against those probabilities. Too few blocks cannot
reproduce the within/between contrast; too many fit noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .clustering import SpectralConfig, spectral_cluster
from .graph import as_adjacency

EPS = 1e-6


@dataclass
class CvResult:
    candidate_ks: list[int]
    losses: list[float]
    chosen_k: int
    folds: int
    seed: int
    loss: str = "mse"
    fold_losses: list[list[float]] = field(default_factory=list)


def pair_folds(n: int, folds: int, seed) -> list[tuple[np.ndarray, np.ndarray]]:
    """Randomly partition the unordered pairs ``i < j`` into ``folds`` near-equal groups."""
    iu, ju = np.triu_indices(n, k=1)
    perm = np.random.default_rng(seed).permutation(iu.size)
    return [(iu[part], ju[part]) for part in np.array_split(perm, folds)]


def _block_probs(E, labels, K, train_mask, fallback):
    iu, ju = np.nonzero(np.triu(train_mask, k=1))
    a, b = labels[iu], labels[ju]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    edges = np.zeros((K, K))
    pairs = np.zeros((K, K))
    np.add.at(edges, (lo, hi), E[iu, ju])
    np.add.at(pairs, (lo, hi), 1)
    B = np.full((K, K), fallback)
    seen = pairs > 0
    B[seen] = edges[seen] / pairs[seen]
    return np.triu(B) + np.triu(B, 1).T


def _score(y, p, loss):
    if loss == "mse":
        return float(np.mean((y - p) ** 2))
    p = np.clip(p, EPS, 1 - EPS)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


def cv_loss(E, K: int, folds, config: SpectralConfig, loss: str = "mse") -> list[float]:
    E = as_adjacency(E)
    n = E.shape[0]
    out = []
    for hi, hj in folds:
        held = np.zeros((n, n), dtype=bool)
        held[hi, hj] = held[hj, hi] = True
        train = ~held
        np.fill_diagonal(train, False)
        density = E[np.triu(train, 1)].mean()
        A = E.copy()
        A[held] = density
        labels = spectral_cluster(A, K, config, weighted=True).labels
        B = _block_probs(E, labels, K, train, density)
        out.append(_score(E[hi, hj], B[labels[hi], labels[hj]], loss))
    return out


def select_k(
    E,
    k_min: int = 1,
    k_max: int | None = None,
    folds: int = 5,
    seed: int = 0,
    loss: str = "mse",
    config: SpectralConfig | None = None,
) -> CvResult:
    """Pick K in ``[k_min, k_max]`` minimizing the mean held-out loss (smallest K on ties).

    ``loss`` is ``"mse"`` (squared error against the block probability) or
    ``"nll"`` (Bernoulli negative log-likelihood, probabilities clamped to
    ``[1e-6, 1 - 1e-6]``).
    """
    E = as_adjacency(E)
    n = E.shape[0]
    if k_max is None:
        k_max = max(k_min, min(10, n // 4))
    if not 1 <= k_min <= k_max:
        raise ValueError(f"need 1 <= k_min <= k_max, got {k_min}, {k_max}")
    if k_max > n / 2:
        raise ValueError(f"k_max={k_max} exceeds n/2={n / 2}; embedding would be unstable")
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if loss not in ("mse", "nll"):
        raise ValueError(f"unknown loss {loss!r}")
    config = config or SpectralConfig(seed=seed)
    parts = pair_folds(n, folds, seed)
    ks = list(range(k_min, k_max + 1))
    per_fold = [cv_loss(E, k, parts, config, loss) for k in ks]
    means = [float(np.mean(f)) for f in per_fold]
    chosen = ks[int(np.argmin(means))]
    return CvResult(ks, means, chosen, folds, seed, loss, per_fold)
