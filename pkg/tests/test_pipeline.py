import math

import numpy as np
import pytest

from spectral_entropy.assignment import ClusterAssignment
from spectral_entropy.corpus import builtin_lists, generate_collection
from spectral_entropy.entropy import entropy
from spectral_entropy.graph import SbmParams, sample_sbm
from spectral_entropy.oracle import EdgeOracle, MockOracle, OracleError
from spectral_entropy.pipeline import PipelineError, run_pipeline


class BrokenOracle(EdgeOracle):
    def judge_pair(self, i, j, a, b):
        raise OracleError("endpoint down")

    def config(self):
        return {}


def collection(ratios, n, seed=0):
    return generate_collection(builtin_lists()["hobbies"], 3, ratios, n, seed=seed)


def test_exact_recovery_two_blocks():
    coll = collection((0.5, 0.5), 30)
    rep = run_pipeline(coll.texts, MockOracle(coll.truth, 1.0, 0.0), truth=coll.truth)
    assert rep.gap_bar_hat == 0
    assert rep.m_error == 0
    assert rep.e_hat == pytest.approx(math.log(2), abs=1e-12)
    assert rep.cluster_sizes == [15, 15]
    assert (rep.p_hat, rep.q_hat) == (1.0, 0.0)


def test_true_k_entropy_matches_allocation():
    coll = collection((0.2, 0.3, 0.5), 30)
    rep = run_pipeline(coll.texts, MockOracle(coll.truth, 0.9, 0.1), truth=coll.truth, k="true")
    assert rep.e_bar == pytest.approx(entropy([0.2, 0.3, 0.5]), abs=1e-12)
    assert rep.K == 3


def test_a21_mean_gap():
    gaps = []
    for seed in range(10):
        coll = collection((0.2, 0.3, 0.5), 30, seed)
        rep = run_pipeline(coll.texts, MockOracle(coll.truth, 0.96, 0.15, seed), truth=coll.truth, seed=seed)
        gaps.append(rep.gap_bar_hat)
    assert np.mean(gaps) <= 0.1


def test_bounds_attached():
    E, truth = sample_sbm(SbmParams(0.9, 0.1, [20, 20, 20]), seed=0)
    rep = run_pipeline(E=E, truth=truth, alpha_n=1.0, p_vec=[1 / 3] * 3)
    assert {"lemma1", "theorem2", "corollary3", "theorem4"} <= set(rep.bounds)
    assert rep.gap_bar_hat <= rep.bounds["lemma1"]
    assert rep.bounds["theorem4"] > 0
    assert rep.e_true == pytest.approx(math.log(3))
    # m(n) <= 0 at n = 15: the bound is vacuous, which is not an error
    E, truth = sample_sbm(SbmParams(0.9, 0.1, [5, 5, 5]), seed=0)
    assert run_pipeline(E=E, truth=truth, p_vec=[1 / 3] * 3).bounds["theorem4"] is None


def test_cv_and_fixed_k():
    E, truth = sample_sbm(SbmParams(1.0, 0.0, [10, 10]), seed=0)
    assert run_pipeline(E=E, k="cv").K == 2
    rep = run_pipeline(E=E, truth=truth, k=3)
    assert rep.K == 3
    assert "lemma1" not in rep.bounds
    assert rep.m_error >= 0


def test_no_truth():
    E, _ = sample_sbm(SbmParams(1.0, 0.0, [4, 4]), seed=0)
    rep = run_pipeline(E=E, k=2)
    assert rep.e_bar is None and rep.m_error is None
    with pytest.raises(ValueError, match="true"):
        run_pipeline(E=E)


def test_stage_errors():
    with pytest.raises(PipelineError) as info:
        run_pipeline(["a", "b", "c"], BrokenOracle(), k=1)
    assert info.value.stage == "oracle"
    assert isinstance(info.value.__cause__, OracleError)
    with pytest.raises(ValueError):
        run_pipeline(["a"], BrokenOracle(), k=1)
    with pytest.raises(ValueError):
        run_pipeline(E=np.zeros((3, 3)), truth=ClusterAssignment([0, 1]), k=2)
    with pytest.raises(ValueError):
        run_pipeline()
