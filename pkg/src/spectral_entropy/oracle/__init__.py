"""Pairwise equivalence judges and adjacency assembly."""

from .base import POLICIES, EdgeOracle, OracleError, PqEstimate, build_adjacency, estimate_pq
from .cache import CachedOracle, VerdictCache, text_digest
from .llm import (
    TEMPLATES,
    LlmOracle,
    LlmOracleConfig,
    LlmStatusError,
    LlmTransportError,
    UnparseableVerdictError,
    load_template,
    parse_verdict,
    render_prompt,
)
from .mock import MockOracle, pair_uniform

__all__ = [
    "POLICIES",
    "TEMPLATES",
    "CachedOracle",
    "EdgeOracle",
    "LlmOracle",
    "LlmOracleConfig",
    "LlmStatusError",
    "LlmTransportError",
    "MockOracle",
    "OracleError",
    "PqEstimate",
    "UnparseableVerdictError",
    "VerdictCache",
    "build_adjacency",
    "estimate_pq",
    "load_template",
    "pair_uniform",
    "parse_verdict",
    "render_prompt",
    "text_digest",
]
