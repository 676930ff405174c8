import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectral_entropy.assignment import ClusterAssignment
from spectral_entropy.clustering import (
    SpectralConfig,
    align_labels,
    confusion_matrix,
    kmeans,
    kmeans_cost,
    lloyd,
    miscluster_error,
    spectral_cluster,
)
from spectral_entropy.graph import SbmParams, sample_sbm


def test_assignment_basics():
    a = ClusterAssignment([0, 0, 2], K=4)
    assert a.n == 3 and a.K == 4
    assert a.counts.tolist() == [2, 0, 1, 0]
    assert a.has_empty
    assert a.one_hot.sum(axis=1).tolist() == [1, 1, 1]
    with pytest.raises(ValueError):
        a.labels[0] = 1
    with pytest.raises(ValueError):
        ClusterAssignment([-1, 0])
    with pytest.raises(ValueError):
        ClusterAssignment([0, 3], K=2)
    assert a == ClusterAssignment([0, 0, 2], K=4)
    assert a != ClusterAssignment([0, 0, 2])


def test_kmeans_single_cluster():
    X = np.random.default_rng(0).normal(size=(40, 3))
    res = kmeans(X, 1)
    assert np.allclose(res.centers[0], X.mean(axis=0))
    assert res.cost == pytest.approx(((X - X.mean(axis=0)) ** 2).sum())


def test_kmeans_duplicates():
    X = np.array([[0.0, 0.0], [0.0, 0.0], [5.0, 1.0], [5.0, 1.0]])
    res = kmeans(X, 2)
    assert res.cost == 0
    assert res.assignment.labels[0] == res.assignment.labels[1] != res.assignment.labels[2] == res.assignment.labels[3]


def test_kmeans_blobs():
    centers = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    truth = ClusterAssignment(np.repeat([0, 1, 2], 20))
    good = 0
    for seed in range(100):
        X = centers[truth.labels] + np.random.default_rng(seed).normal(scale=0.01, size=(60, 2))
        res = kmeans(X, 3, restarts=10, seed=seed)
        good += miscluster_error(res.assignment, truth) == 0
    assert good >= 95


def test_kmeans_no_empty_clusters():
    X = np.random.default_rng(1).normal(size=(12, 2))
    for seed in range(20):
        assert not kmeans(X, 12, seed=seed).assignment.has_empty


def test_kmeans_restart_order():
    X = np.random.default_rng(2).normal(size=(50, 2))
    more = kmeans(X, 4, restarts=8, seed=3)
    fewer = kmeans(X, 4, restarts=4, seed=3)
    assert more.cost <= fewer.cost


def test_lloyd_monotone():
    X = np.random.default_rng(4).normal(size=(80, 2))
    hist = []
    lloyd(X, X[:5].copy(), history=hist)
    assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))


def test_kmeans_input_errors():
    with pytest.raises(ValueError):
        kmeans(np.zeros((3, 2)), 4)
    with pytest.raises(ValueError):
        kmeans(np.zeros((3, 2)), 0)
    with pytest.raises(ValueError):
        kmeans(np.zeros((0, 2)), 1)


def test_spectral_exact_blocks():
    E, truth = sample_sbm(SbmParams(1.0, 0.0, [5, 5, 5]), seed=0)
    pred = spectral_cluster(E, 3)
    assert miscluster_error(pred, truth) == 0


def test_spectral_k1():
    E, _ = sample_sbm(SbmParams(0.5, 0.5, [7]), seed=0)
    assert spectral_cluster(E, 1).labels.tolist() == [0] * 7


def test_spectral_sbm_rate():
    frac = []
    for seed in range(50):
        E, truth = sample_sbm(SbmParams(0.9, 0.1, [30, 30, 30]), seed)
        frac.append(miscluster_error(spectral_cluster(E, 3, SpectralConfig(seed=seed)), truth) / 2 / 90)
    assert np.mean(frac) <= 0.05


def test_spectral_deterministic():
    E, _ = sample_sbm(SbmParams(0.6, 0.3, [10, 10]), seed=5)
    assert spectral_cluster(E, 2) == spectral_cluster(E, 2)


def test_align_swap():
    truth = ClusterAssignment([0, 0, 1, 1, 2])
    pred = ClusterAssignment([1, 1, 0, 0, 2])
    assert align_labels(pred, truth).tolist() == [1, 0, 2]
    assert align_labels(truth, truth).tolist() == [0, 1, 2]
    assert miscluster_error(pred, truth) == 0
    assert miscluster_error(pred, truth, aligned=False) == 8


def test_align_one_moved():
    truth = ClusterAssignment([0, 0, 1, 1, 2, 2])
    pred = ClusterAssignment([0, 0, 1, 2, 2, 2])
    assert align_labels(pred, truth).tolist() == [0, 1, 2]
    # brute force over all permutations agrees
    best = min(
        2 * int(np.count_nonzero(np.array(perm)[pred.labels] != truth.labels))
        for perm in itertools.permutations(range(3))
    )
    assert miscluster_error(pred, truth) == best == 2


def test_confusion():
    C = confusion_matrix(ClusterAssignment([0, 1, 1]), ClusterAssignment([1, 1, 0]))
    assert C.tolist() == [[0, 1], [1, 1]]


def test_mismatched_pairs():
    with pytest.raises(ValueError):
        miscluster_error(ClusterAssignment([0, 1]), ClusterAssignment([0, 1, 1]))
    with pytest.raises(ValueError):
        miscluster_error(ClusterAssignment([0, 1], K=3), ClusterAssignment([0, 1]))


@st.composite
def labelled(draw):
    K = draw(st.integers(1, 5))
    n = draw(st.integers(1, 30))
    labels = draw(st.lists(st.integers(0, K - 1), min_size=n, max_size=n))
    perm = draw(st.permutations(range(K)))
    return ClusterAssignment(labels, K), np.array(perm)


@given(labelled())
def test_permutation_invariance(case):
    truth, perm = case
    assert miscluster_error(truth.relabel(perm), truth) == 0


@given(labelled(), st.data())
def test_aligned_error_matches_brute_force(case, data):
    truth, _ = case
    K = truth.K
    if K > 4:
        return
    pred = ClusterAssignment(data.draw(st.lists(st.integers(0, K - 1), min_size=truth.n, max_size=truth.n)), K)
    best = min(
        2 * int(np.count_nonzero(np.array(p)[pred.labels] != truth.labels)) for p in itertools.permutations(range(K))
    )
    assert miscluster_error(pred, truth) == best
    assert miscluster_error(pred, truth) % 2 == 0
