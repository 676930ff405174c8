from __future__ import annotations

import abc
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..assignment import ClusterAssignment

POLICIES = ("single", "and", "or")


class OracleError(RuntimeError):
    """An oracle could not produce a verdict for a pair."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class EdgeOracle(abc.ABC):
    """Judge of pairwise semantic equivalence between two texts.

    Subclasses implement :meth:`judge_pair`, which sees both the positions of
    the texts in the collection and the texts themselves. Text-only judges
    (LLM endpoints) ignore the indices; simulated judges key on them.
    """

    #: whether judge(a, b) == judge(b, a) is guaranteed by construction
    symmetric = False

    @abc.abstractmethod
    def judge_pair(self, i: int, j: int, text_a: str, text_b: str) -> bool:
        ...

    def judge(self, text_a: str, text_b: str) -> bool:
        raise TypeError(f"{type(self).__name__} needs item indices; use judge_pair")

    @abc.abstractmethod
    def config(self) -> dict:
        """JSON-serializable description of everything that affects verdicts."""

    @property
    def fingerprint(self) -> str:
        blob = json.dumps({"kind": type(self).__name__, **self.config()}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _pair_queries(n: int, policy: str) -> list[tuple[int, int]]:
    if policy not in POLICIES:
        raise ValueError(f"unknown symmetrization policy {policy!r}; expected one of {POLICIES}")
    iu, ju = np.triu_indices(n, k=1)
    pairs = list(zip(iu.tolist(), ju.tolist()))
    if policy == "single":
        return pairs
    return pairs + [(j, i) for i, j in pairs]


def build_adjacency(
    texts: Sequence[str],
    oracle: EdgeOracle,
    policy: str = "single",
    max_inflight: int = 1,
) -> np.ndarray:
    """Query ``oracle`` on every pair of ``texts`` and assemble the adjacency matrix.

    ``single`` asks once per unordered pair; ``and``/``or`` ask both orders
    and combine. Up to ``max_inflight`` queries run concurrently; the result
    does not depend on completion order.
    """
    n = len(texts)
    if n < 2:
        raise ValueError(f"need at least 2 texts, got {n}")
    queries = _pair_queries(n, policy)

    def ask(pair):
        i, j = pair
        try:
            return bool(oracle.judge_pair(i, j, texts[i], texts[j]))
        except OracleError as exc:
            raise OracleError(f"oracle failed on pair ({i}, {j}): {exc}", pair=(i, j)) from exc

    if max_inflight <= 1:
        verdicts = [ask(p) for p in queries]
    else:
        with ThreadPoolExecutor(max_workers=max_inflight) as pool:
            verdicts = list(pool.map(ask, queries))

    got = dict(zip(queries, verdicts))
    E = np.zeros((n, n), dtype=np.int8)
    for i, j in queries[: n * (n - 1) // 2]:
        if policy == "single":
            v = got[i, j]
        elif policy == "and":
            v = got[i, j] and got[j, i]
        else:
            v = got[i, j] or got[j, i]
        E[i, j] = E[j, i] = v
    return E


@dataclass(frozen=True)
class PqEstimate:
    p_hat: float
    q_hat: float
    within_pairs: int
    between_pairs: int

    @property
    def separation(self) -> float:
        return self.p_hat - self.q_hat


def estimate_pq(E, truth: ClusterAssignment) -> PqEstimate:
    """Observed edge frequencies within and between the true clusters."""
    E = np.asarray(E)
    if E.shape != (truth.n, truth.n):
        raise ValueError(f"adjacency shape {E.shape} does not match {truth.n} items")
    iu = np.triu_indices(truth.n, k=1)
    same = truth.labels[iu[0]] == truth.labels[iu[1]]
    edges = E[iu].astype(bool)
    n_in, n_out = int(same.sum()), int((~same).sum())
    if n_in == 0:
        raise ValueError("no within-cluster pairs: every true cluster is a singleton")
    if n_out == 0:
        raise ValueError("no between-cluster pairs: truth has a single cluster, q_hat undefined")
    return PqEstimate(
        p_hat=float(edges[same].sum() / n_in),
        q_hat=float(edges[~same].sum() / n_out),
        within_pairs=n_in,
        between_pairs=n_out,
    )
