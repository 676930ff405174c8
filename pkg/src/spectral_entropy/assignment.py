from __future__ import annotations

import numpy as np


class ClusterAssignment:
    """Hard cluster membership for ``n`` items over ``K`` clusters.

    Labels are 0-based integers. Clusters may be empty; check ``has_empty``.
    """

    __slots__ = ("labels", "K")

    def __init__(self, labels, K: int | None = None):
        labels = np.asarray(labels)
        if labels.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        if labels.size and not np.issubdtype(labels.dtype, np.integer):
            if not np.all(np.equal(np.mod(labels, 1), 0)):
                raise ValueError("labels must be integers")
        labels = labels.astype(np.int64)
        if labels.size and labels.min() < 0:
            raise ValueError("labels must be non-negative")
        k_needed = int(labels.max()) + 1 if labels.size else 0
        if K is None:
            K = k_needed
        if K < max(k_needed, 1):
            raise ValueError(f"K={K} is smaller than the number of labels used ({k_needed})")
        labels.setflags(write=False)
        self.labels = labels
        self.K = int(K)

    @property
    def n(self) -> int:
        return self.labels.size

    @property
    def one_hot(self) -> np.ndarray:
        g = np.zeros((self.n, self.K), dtype=np.int64)
        g[np.arange(self.n), self.labels] = 1
        return g

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.K)

    @property
    def has_empty(self) -> bool:
        return bool(np.any(self.counts == 0))

    def relabel(self, perm) -> "ClusterAssignment":
        """Return a copy where label ``j`` becomes ``perm[j]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return ClusterAssignment(perm[self.labels], self.K)

    def __eq__(self, other):
        if not isinstance(other, ClusterAssignment):
            return NotImplemented
        return self.K == other.K and np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash((self.K, self.labels.tobytes()))

    def __repr__(self):
        return f"ClusterAssignment(n={self.n}, K={self.K}, counts={self.counts.tolist()})"
