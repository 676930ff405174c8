"""End-to-end semantic spectral entropy for one collection."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .assignment import ClusterAssignment
from .clustering import SpectralConfig, miscluster_error, spectral_cluster
from .entropy import (
    BoundConditionError,
    BoundInputs,
    EntropyReport,
    as_probabilities,
    assignment_entropy,
    corollary3_bound,
    entropy,
    lemma1_bound,
    theorem2_bound,
    theorem4_bound,
)
from .graph import SpectralError, as_adjacency
from .model_selection import select_k
from .oracle import EdgeOracle, OracleError, build_adjacency, estimate_pq


class PipelineError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it and ``__cause__`` holds the original error."""

    def __init__(self, stage: str, exc: BaseException):
        super().__init__(f"{stage} stage failed: {exc}")
        self.stage = stage


class LemmaViolation(AssertionError):
    """The deterministic entropy-gap inequality failed, which means a bug."""


def _resolve_k(k, E, truth, seed, config):
    if isinstance(k, (int, np.integer)):
        return int(k)
    if k == "true":
        if truth is None:
            raise ValueError("K policy 'true' needs ground-truth labels")
        return truth.K
    if k == "cv":
        n = E.shape[0]
        k_max = max(1, min(10, n // 4))
        return select_k(E, 1, k_max, seed=seed, config=config).chosen_k
    raise ValueError(f"K must be an integer, 'true' or 'cv'; got {k!r}")


def run_pipeline(
    texts: Sequence[str] | None = None,
    oracle: EdgeOracle | None = None,
    *,
    E=None,
    truth: ClusterAssignment | None = None,
    k="true",
    seed: int = 0,
    config: SpectralConfig | None = None,
    policy: str = "single",
    max_inflight: int = 1,
    p_vec=None,
    alpha_n: float | None = None,
    check_lemma: bool = True,
) -> EntropyReport:
    """Estimate the semantic entropy of a collection.

    Either ``texts`` with an ``oracle`` or a ready adjacency matrix ``E`` must
    be given. With ``truth`` the report also carries the empirical entropy,
    the aligned miscluster count, observed edge rates and the bounds that
    apply; ``p_vec`` (the generating cluster probabilities) adds the true
    entropy and the generative-model bound.
    """
    config = config or SpectralConfig(seed=seed)
    if E is None:
        if texts is None or oracle is None:
            raise ValueError("give either texts and an oracle, or an adjacency matrix")
        if len(texts) < 2:
            raise ValueError(f"need at least 2 texts, got {len(texts)}")
        try:
            E = build_adjacency(texts, oracle, policy, max_inflight)
        except OracleError as exc:
            raise PipelineError("oracle", exc) from exc
    E = np.asarray(E)
    as_adjacency(E)
    n = E.shape[0]
    if truth is not None and truth.n != n:
        raise ValueError(f"truth covers {truth.n} items but the graph has {n}")

    try:
        K = _resolve_k(k, E, truth, seed, config)
        pred = spectral_cluster(E, K, config)
    except (SpectralError, np.linalg.LinAlgError) as exc:
        raise PipelineError("clustering", exc) from exc

    report = EntropyReport(
        e_hat=assignment_entropy(pred),
        K=K,
        cluster_sizes=sorted(pred.counts.tolist(), reverse=True),
        assignment=pred,
    )
    if p_vec is not None:
        p_vec = as_probabilities(p_vec)
        report.e_true = entropy(p_vec)
        try:
            report.bounds["theorem4"] = theorem4_bound(n, p_vec.size, float(p_vec.min()))
        except BoundConditionError:
            report.bounds["theorem4"] = None
    if truth is None:
        return report

    report.e_bar = assignment_entropy(truth)
    if truth.n > 1 and truth.K > 1 and np.any(truth.counts > 1):
        pq = estimate_pq(E, truth)
        report.p_hat, report.q_hat = pq.p_hat, pq.q_hat
    if K != truth.K:
        # lemma needs a common K; the padded count is still a useful error measure
        k_pad = max(K, truth.K)
        report.m_error = miscluster_error(ClusterAssignment(pred.labels, k_pad), ClusterAssignment(truth.labels, k_pad))
    else:
        report.m_error = miscluster_error(pred, truth)
        if truth.counts.min() > 0:
            inputs = BoundInputs.from_assignment(truth, alpha_n=alpha_n)
            bound = lemma1_bound(inputs, report.m_error)
            report.bounds["lemma1"] = bound
            if check_lemma and report.gap_bar_hat > bound + 1e-12:
                raise LemmaViolation(f"gap {report.gap_bar_hat} exceeds deterministic bound {bound}")
            if alpha_n is not None:
                report.bounds["theorem2"] = theorem2_bound(inputs)
                report.bounds["corollary3"] = corollary3_bound(K, inputs.c2, alpha_n, n)
    return report
