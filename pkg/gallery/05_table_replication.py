"""
Replaying the judge table with simulated judges
===============================================

Six language models were measured as judges, each summarised by how often it
links same-meaning pairs (p) and different-meaning pairs (q). Feeding those
rates to a simulated judge reproduces the pattern: large p - q, small gap.
"""

import tempfile

from spectral_entropy.simulation import ExperimentConfig, load_report, persist_report, run_table1, table1_rows

cfg = ExperimentConfig("table1", replications=3, seed=0)
rep = run_table1(cfg)

for row in table1_rows(rep):
    print(",".join(row))

print()
for model, gap in rep.summary["grid_mean_gap"].items():
    p, q = cfg.pq[model]
    live = sum(rep.summary["reported_gaps"][model]) / 9
    print(f"{model:>10}: p-q={p - q:.2f}  simulated mean gap {gap:.3f}  live-judge mean gap {live:.3f}")

with tempfile.TemporaryDirectory() as d:
    persist_report(rep, d)
    again = load_report(d)
    print("\nreloaded", len(again.records), "runs; format version", again.format_version)
