"""Adjacency matrices, Laplacians, SBM sampling and spectral embeddings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .assignment import ClusterAssignment

VARIANTS = ("unnormalized", "normalized", "adjacency")


class SpectralError(RuntimeError):
    """Raised when an eigendecomposition fails or returns unusable output."""


def as_adjacency(E, *, weighted: bool = False) -> np.ndarray:
    """Validate ``E`` and return it as a float array.

    Binary entries, symmetry and a zero diagonal are checked. With
    ``weighted=True`` any finite symmetric matrix with entries in [0, 1] is
    accepted, which is what the imputed matrices of cross-validation look like.
    """
    E = np.asarray(E)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {E.shape}")
    if E.shape[0] < 1:
        raise ValueError("adjacency must have at least one node")
    if weighted:
        E = E.astype(float)
        if not np.all(np.isfinite(E)) or E.min() < 0 or E.max() > 1:
            raise ValueError("weighted adjacency entries must lie in [0, 1]")
    else:
        if not np.isin(E, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        E = E.astype(float)
    if not np.array_equal(E, E.T):
        raise ValueError("adjacency must be symmetric")
    if np.any(np.diag(E) != 0):
        raise ValueError("adjacency must have a zero diagonal")
    return E


@dataclass(frozen=True)
class SbmParams:
    """Two-level stochastic block model: ``p`` within blocks, ``q`` between."""

    p: float
    q: float
    sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes:
            raise ValueError("need at least one block")
        if any(s < 1 for s in self.sizes):
            raise ValueError(f"block sizes must be positive, got {self.sizes}")
        for name in ("p", "q"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @property
    def K(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def separation(self) -> float:
        return self.p - self.q

    @classmethod
    def from_n(cls, p: float, q: float, sizes: Sequence[int], n: int) -> "SbmParams":
        params = cls(p, q, tuple(sizes))
        if params.n != n:
            raise ValueError(f"sizes sum to {params.n}, expected {n}")
        return params


def block_labels(sizes: Sequence[int]) -> np.ndarray:
    return np.repeat(np.arange(len(sizes)), sizes)


def sample_sbm(params: SbmParams, seed) -> tuple[np.ndarray, ClusterAssignment]:
    """Draw an adjacency matrix from ``params`` with nodes ordered by block.

    Each unordered pair is one Bernoulli draw. Returns the integer adjacency
    matrix and the ground-truth assignment.
    """
    rng = np.random.default_rng(seed)
    labels = block_labels(params.sizes)
    n = labels.size
    same = labels[:, None] == labels[None, :]
    prob = np.where(same, params.p, params.q)
    iu = np.triu_indices(n, k=1)
    draws = rng.random(iu[0].size) < prob[iu]
    E = np.zeros((n, n), dtype=np.int8)
    E[iu] = draws
    E = E + E.T
    return E, ClusterAssignment(labels, params.K)


def sample_sbm_from_labels(labels, p: float, q: float, seed) -> np.ndarray:
    """Like :func:`sample_sbm` but for arbitrary (unsorted) node labels."""
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    n = labels.size
    prob = np.where(labels[:, None] == labels[None, :], p, q)
    iu = np.triu_indices(n, k=1)
    E = np.zeros((n, n), dtype=np.int8)
    E[iu] = rng.random(iu[0].size) < prob[iu]
    return E + E.T


def degrees(E) -> np.ndarray:
    E = np.asarray(E)
    if np.issubdtype(E.dtype, np.integer) or E.dtype == bool:
        return E.astype(np.int64).sum(axis=1)
    return E.sum(axis=1)


def laplacian(E) -> np.ndarray:
    """Unnormalized Laplacian ``D - E``.

    Integer adjacency is summed in integer arithmetic so row sums are exactly
    zero before conversion to float.
    """
    E = np.asarray(E)
    if np.issubdtype(E.dtype, np.integer) or E.dtype == bool:
        Ei = E.astype(np.int64)
        L = np.diag(Ei.sum(axis=1)) - Ei
        return L.astype(float)
    return np.diag(E.sum(axis=1)) - E


def normalized_laplacian(E) -> np.ndarray:
    """Symmetric normalized Laplacian ``I - D^-1/2 E D^-1/2``; isolated nodes get a zero row."""
    E = np.asarray(E, dtype=float)
    d = E.sum(axis=1)
    inv_sqrt = np.zeros_like(d)
    nz = d > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(d[nz])
    A = inv_sqrt[:, None] * E * inv_sqrt[None, :]
    return np.diag(nz.astype(float)) - A


@dataclass(frozen=True)
class Embedding:
    """Spectral embedding: ``vectors`` is n x K with orthonormal columns."""

    vectors: np.ndarray
    eigenvalues: np.ndarray
    variant: str = field(default="unnormalized")

    @property
    def K(self) -> int:
        return self.vectors.shape[1]


def fix_signs(U: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry (lowest index on ties) is positive."""
    U = U.copy()
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def spectral_embedding(E, K: int, variant: str = "unnormalized", *, weighted: bool = False) -> Embedding:
    """Eigenvectors of a graph matrix used as node coordinates.

    ``unnormalized`` takes the K smallest eigenvalues of ``D - E``,
    ``normalized`` the K smallest of ``I - D^-1/2 E D^-1/2`` (both ascending),
    and ``adjacency`` the K largest-magnitude eigenvalues of ``E`` itself
    (descending magnitude).
    """
    A = as_adjacency(E, weighted=weighted)
    n = A.shape[0]
    if not 1 <= K <= n:
        raise ValueError(f"K must satisfy 1 <= K <= n={n}, got {K}")
    if variant == "unnormalized":
        M = laplacian(np.asarray(E) if not weighted else A)
    elif variant == "normalized":
        M = normalized_laplacian(A)
    elif variant == "adjacency":
        M = A
    else:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")

    try:
        w, V = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigendecomposition failed: {exc}") from exc
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(V))):
        raise SpectralError("eigendecomposition returned non-finite values")

    if variant == "adjacency":
        # stable sort keeps eigh's ascending order among equal magnitudes
        order = np.argsort(-np.abs(w), kind="stable")[:K]
    else:
        order = np.arange(K)
    return Embedding(fix_signs(V[:, order]), w[order].copy(), variant)
