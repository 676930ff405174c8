"""
Where clustering starts to work, and how fast it improves
=========================================================

Sweep p at fixed q = 0.05 to find the separation where the entropy gap
collapses, then grow n at a separation where errors still happen to see the
gap shrink.
"""

from spectral_entropy.simulation import ExperimentConfig, run_phase_sweep, run_rate_study

sweep = run_phase_sweep(ExperimentConfig("phase_sweep", replications=10))
for sep, gap in zip(sweep.summary["separations"], sweep.summary["mean_gaps"]):
    print(f"p-q={sep:.1f}  mean gap {gap:.4f}  " + "#" * int(60 * gap))
print("gap stays below 0.1 from p-q =", sweep.summary["change_point"])

# at p=0.9, q=0.1 recovery is already exact at n=30, so use a harder pair
rate = run_rate_study(ExperimentConfig("rate_study", pq={"hard": [0.6, 0.3]}, sizes=[30, 60, 120, 240], replications=20))
for n, gap, err in zip(rate.summary["sizes"], rate.summary["mean_gaps"], rate.summary["mean_m_error_rates"]):
    print(f"n={n:4d}  mean gap {gap:.4f}  misplaced fraction {err / 2:.4f}")
print("log-log slope:", rate.summary["slope"])
