"""
Using a real language model as the judge
========================================

Point the judge at any chat-completion endpoint through SSE_ENDPOINT,
SSE_MODEL and SSE_API_KEY. Verdicts are cached on disk, so a second run costs
nothing. Without those variables the script only shows the prompt it would
send.
"""

import os

from spectral_entropy import run_pipeline
from spectral_entropy.oracle import CachedOracle, LlmOracle, LlmOracleConfig, VerdictCache, render_prompt

texts = [
    "John likes running and reading.",
    "Reading and jogging are John's hobbies.",
    "John enjoys caving and rowing.",
    "Spelunking and sculling are what John does for fun.",
]
print(render_prompt("formatted", texts[0], texts[1]))

if not (os.environ.get("SSE_ENDPOINT") and os.environ.get("SSE_MODEL")):
    print("set SSE_ENDPOINT and SSE_MODEL (and SSE_API_KEY) to query a model")
else:
    judge = CachedOracle(LlmOracle(LlmOracleConfig(template="formatted")), VerdictCache("verdicts.ndjson"))
    rep = run_pipeline(texts, judge, k=2, max_inflight=4)
    print("estimated entropy:", round(rep.e_hat, 6), "clusters:", rep.assignment.labels.tolist())
    print("cache hits", judge.hits, "misses", judge.misses)
