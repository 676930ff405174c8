"""
Choosing the number of meanings
===============================

When the number of clusters is unknown, hold out node pairs, fit block
probabilities on the rest and keep the K that predicts the held-out pairs
best.
"""

from spectral_entropy import run_pipeline, select_k
from spectral_entropy.graph import SbmParams, sample_sbm

E, truth = sample_sbm(SbmParams(0.9, 0.1, (40, 40, 40)), seed=0)
res = select_k(E, k_min=1, k_max=6, folds=5, seed=0)
for k, loss in zip(res.candidate_ks, res.losses):
    print(f"K={k}: held-out squared error {loss:.6f}")
print("chosen K:", res.chosen_k)

# the same choice inside the pipeline
rep = run_pipeline(E=E, truth=truth, k="cv")
print(f"K={rep.K}, estimated entropy {rep.e_hat:.6f}, true {rep.e_bar:.6f}")

# a loss that weights confident mistakes more
print("with log-loss:", select_k(E, 1, 6, loss="nll").chosen_k)
