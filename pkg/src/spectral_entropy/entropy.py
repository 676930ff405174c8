"""Plug-in entropies and the closed-form error bounds that go with them.

All logarithms are natural, so entropies are in nats. ``h(x) = x + ln x`` is
the shape shared by every bound below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .assignment import ClusterAssignment


class BoundConditionError(ValueError):
    """A bound was evaluated outside the conditions under which it holds."""


def as_probabilities(p, atol: float = 1e-9) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probability vector must be a non-empty 1-d array")
    if np.any(p < 0):
        raise ValueError("probabilities must be non-negative")
    if abs(p.sum() - 1.0) > atol:
        raise ValueError(f"probabilities must sum to 1, got {p.sum()!r}")
    return p


def entropy(p) -> float:
    """Shannon entropy in nats with ``0 ln 0 = 0``."""
    p = as_probabilities(p)
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum()) + 0.0


def proportions(assignment: ClusterAssignment) -> np.ndarray:
    if assignment.n < 1:
        raise ValueError("assignment is empty")
    return assignment.counts / assignment.n


def assignment_entropy(assignment: ClusterAssignment) -> float:
    return entropy(proportions(assignment))


def h(x: float) -> float:
    if x <= 0:
        raise ValueError(f"h(x) needs x > 0, got {x}")
    return x + math.log(x)


@dataclass(frozen=True)
class BoundInputs:
    """Quantities the finite-sample bounds are stated in.

    ``c2`` is the balance constant with ``2 K n_min / n >= c2``; when omitted
    it defaults to the tightest admissible value ``min(1, 2 K n_min / n)``.
    """

    n: int
    K: int
    n_min: int
    n_max: int
    c2: float | None = None
    alpha_n: float | None = None
    separation: float | None = None

    def __post_init__(self):
        if self.n < 1 or self.K < 1:
            raise BoundConditionError("need n >= 1 and K >= 1")
        if not 1 <= self.n_min <= self.n_max <= self.n:
            raise BoundConditionError(
                f"need 1 <= n_min <= n_max <= n, got n_min={self.n_min}, n_max={self.n_max}, n={self.n}"
            )
        if self.c2 is None:
            object.__setattr__(self, "c2", min(1.0, 2 * self.K * self.n_min / self.n))
        if not 0 < self.c2 <= 1:
            raise BoundConditionError(f"c2 must lie in (0, 1], got {self.c2}")
        if 2 * self.K * self.n_min / self.n < self.c2 * (1 - 1e-12):
            raise BoundConditionError(
                f"balance condition 2*K*n_min/n >= c2 fails: {2 * self.K * self.n_min / self.n} < {self.c2}"
            )

    @classmethod
    def from_assignment(cls, truth: ClusterAssignment, **kw) -> "BoundInputs":
        counts = truth.counts
        return cls(n=truth.n, K=truth.K, n_min=int(counts.min()), n_max=int(counts.max()), **kw)


def lemma1_bound(inputs: BoundInputs, m_error: int) -> float:
    """Deterministic bound on ``|E_bar - E_hat|`` given the miscluster count."""
    if m_error < 0:
        raise ValueError("m_error must be non-negative")
    return h(2 * inputs.K / inputs.c2) * m_error / inputs.n


def theorem2_bound(inputs: BoundInputs) -> float:
    """High-probability bound for a fixed collection under the SBM noise model.

    Reads the edge-probability condition as ``p = alpha_n * (q + lambda)``
    with a user-supplied scale ``alpha_n`` and separation ``lambda > 0``.
    """
    if inputs.alpha_n is None or inputs.alpha_n <= 0:
        raise BoundConditionError("theorem2_bound needs alpha_n > 0")
    if inputs.separation is not None and inputs.separation <= 0:
        raise BoundConditionError(f"separation must be positive, got {inputs.separation}")
    K, c2 = inputs.K, inputs.c2
    return h(2 * K / c2) * inputs.n_max / (4 * c2**2 * inputs.n_min**2 * inputs.alpha_n * K**2)


def corollary3_bound(K: int, c2: float, alpha: float, n: int) -> float:
    """The O(1/n) rate bound obtained for a constant edge-density scale."""
    if not 0 < c2 <= 1:
        raise BoundConditionError(f"c2 must lie in (0, 1], got {c2}")
    if alpha <= 0:
        raise BoundConditionError(f"alpha must be positive, got {alpha}")
    if n < 1 or K < 1:
        raise BoundConditionError("need n >= 1 and K >= 1")
    return h(2 * K / c2) / (c2**4 * alpha * n)


def _check_nk(n, K):
    if n < 2:
        raise BoundConditionError(f"need n >= 2, got {n}")
    if K < 1:
        raise BoundConditionError(f"need K >= 1, got {K}")


def _check_pmin(p_min, K):
    if not 0 < p_min <= 1 / K + 1e-12:
        raise BoundConditionError(f"p_min must lie in (0, 1/K], got {p_min}")


def hoeffding_radius(n: int, K: int) -> float:
    """Radius ``K sqrt(ln(2Kn) / 2n)`` exceeded by ``sum_j |p_j - n_j/n|`` w.p. at most 1/n."""
    _check_nk(n, K)
    return K * math.sqrt(math.log(2 * K * n) / (2 * n))


def chernoff_shrinkage(n: int, K: int, p_min: float) -> float:
    """``m(n) = 1 - sqrt(2 ln(nK) / (n p_min))``; must be positive for the bounds to apply."""
    _check_nk(n, K)
    _check_pmin(p_min, K)
    m = 1 - math.sqrt(2 * math.log(n * K) / (n * p_min))
    if m <= 0:
        raise BoundConditionError(f"m(n) = {m:.6g} <= 0: bound is vacuous at n={n}, K={K}, p_min={p_min}")
    return m


def chernoff_c2(n: int, K: int, p_min: float) -> float:
    return 2 * K * chernoff_shrinkage(n, K, p_min) * p_min


def theorem4_bound(n: int, K: int, p_min: float) -> float:
    """Bound on ``|E_true - E_hat|`` under i.i.d. generation, holding w.p. at least 1 - 3/n."""
    m = chernoff_shrinkage(n, K, p_min)
    sampling = h(1 / p_min) * hoeffding_radius(n, K)
    clustering = h(1 / (m * p_min)) / (16 * K**4 * m**4 * p_min**4 * n)
    return sampling + clustering


@dataclass
class EntropyReport:
    """Entropies of one run in nats plus whatever bounds applied."""

    e_hat: float
    e_bar: float | None = None
    e_true: float | None = None
    m_error: int | None = None
    bounds: dict = field(default_factory=dict)
    cluster_sizes: list = field(default_factory=list)
    K: int | None = None
    p_hat: float | None = None
    q_hat: float | None = None
    assignment: ClusterAssignment | None = field(default=None, repr=False)

    @property
    def gap_bar_hat(self) -> float | None:
        return None if self.e_bar is None else abs(self.e_bar - self.e_hat)

    @property
    def gap_true_hat(self) -> float | None:
        return None if self.e_true is None else abs(self.e_true - self.e_hat)

    @property
    def gap_true_bar(self) -> float | None:
        if self.e_true is None or self.e_bar is None:
            return None
        return abs(self.e_true - self.e_bar)

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "e_hat": self.e_hat,
            "e_bar": self.e_bar,
            "e_true": self.e_true,
            "gap_bar_hat": self.gap_bar_hat,
            "gap_true_hat": self.gap_true_hat,
            "m_error": self.m_error,
            "p_hat": self.p_hat,
            "q_hat": self.q_hat,
            "cluster_sizes": list(self.cluster_sizes),
            "bounds": dict(self.bounds),
        }
