"""
How far can the estimate be off?
================================

Evaluate the closed-form bounds: the deterministic one given a miscluster
count, the high-probability ones under the block model, and the one for
labels drawn at random from cluster probabilities.
"""

from spectral_entropy import (
    BoundInputs,
    chernoff_c2,
    corollary3_bound,
    entropy,
    hoeffding_radius,
    lemma1_bound,
    theorem2_bound,
    theorem4_bound,
)
from spectral_entropy.entropy import BoundConditionError

inputs = BoundInputs(n=150, K=3, n_min=50, n_max=50, c2=1.0, alpha_n=1.0)
for m in (0, 2, 10):
    print(f"misplaced one-hot entries {m:2d}: gap <= {lemma1_bound(inputs, m):.6f}")
print(f"block-model bound: {theorem2_bound(inputs):.6f}")

# the simpler 1/n rate, halving each time n doubles
for n in (100, 200, 400):
    print(f"n={n}: {corollary3_bound(3, 1.0, 1.0, n):.6f}")

# random labels with probabilities (0.2, 0.3, 0.5)
print("true entropy:", round(entropy([0.2, 0.3, 0.5]), 6))
print("Hoeffding radius at n=100:", round(hoeffding_radius(100, 3), 6))
print("Chernoff balance constant at n=100:", round(chernoff_c2(100, 3, 0.2), 6))
for n in (50, 500, 5000, 50000):
    try:
        print(f"n={n}: |E_true - E_hat| <= {theorem4_bound(n, 3, 0.2):.4f}")
    except BoundConditionError as exc:
        print(f"n={n}: vacuous ({exc})")
