from __future__ import annotations

import numpy as np

from ..assignment import ClusterAssignment
from .base import EdgeOracle

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)


def _splitmix64(x):
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = x + np.uint64(0x9E3779B97F4A7C15)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def pair_uniform(seed: int, i, j):
    """Uniform(0, 1) value determined by ``seed`` and the unordered pair ``{i, j}``.

    Counter-based, so any pair can be drawn independently of the others and
    in any order. Vectorizes over ``i`` and ``j``.
    """
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    with np.errstate(over="ignore"):
        x = _splitmix64(np.uint64(seed % 2**64))
        x = _splitmix64(x ^ lo)
        x = _splitmix64(x ^ (hi * np.uint64(0xD1B54A32D192ED03)))
    return (x >> np.uint64(11)).astype(np.float64) * 2.0**-53


class MockOracle(EdgeOracle):
    """Simulated judge following the two-probability noise model.

    Items in the same true cluster are linked with probability ``p``, other
    pairs with probability ``q``. Each unordered pair gets a single draw fixed
    by ``seed``, so repeated or reversed queries agree.
    """

    symmetric = True

    def __init__(self, truth: ClusterAssignment, p: float, q: float, seed: int = 0):
        for name, v in (("p", p), ("q", q)):
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        self.truth = truth
        self.p = float(p)
        self.q = float(q)
        self.seed = int(seed)

    def judge_pair(self, i, j, text_a=None, text_b=None) -> bool:
        n = self.truth.n
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"pair ({i}, {j}) out of range for {n} items")
        if i == j:
            raise ValueError("judge_pair needs two distinct items")
        prob = self.p if self.truth.labels[i] == self.truth.labels[j] else self.q
        return bool(pair_uniform(self.seed, i, j) < prob)

    def adjacency(self) -> np.ndarray:
        """All verdicts at once; equal to querying every pair."""
        n = self.truth.n
        iu = np.triu_indices(n, k=1)
        lab = self.truth.labels
        prob = np.where(lab[iu[0]] == lab[iu[1]], self.p, self.q)
        E = np.zeros((n, n), dtype=np.int8)
        E[iu] = pair_uniform(self.seed, iu[0], iu[1]) < prob
        return E + E.T

    def config(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "seed": self.seed,
            "truth": self.truth.labels.tolist(),
        }
