"""Equivalence judge backed by a chat-completion endpoint."""

from __future__ import annotations

import logging
import os
import re
import time
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import httpx

from .base import EdgeOracle, OracleError

log = logging.getLogger(__name__)

TEMPLATES = ("plain", "formatted")

_TOKEN = re.compile(r"\b(TRUE|FALSE)\b", re.IGNORECASE)
_PREFIX = re.compile(r"\s*(TRUE|FALSE)\b", re.IGNORECASE)


class LlmTransportError(OracleError):
    pass


class LlmStatusError(OracleError):
    def __init__(self, message, status_code=None, pair=None):
        super().__init__(message, pair)
        self.status_code = status_code


class UnparseableVerdictError(OracleError):
    def __init__(self, message, reply=None, pair=None):
        super().__init__(message, pair)
        self.reply = reply


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    if name not in TEMPLATES:
        raise ValueError(f"unknown prompt template {name!r}; expected one of {TEMPLATES}")
    return resources.files(__package__).joinpath("prompts", f"{name}.txt").read_text(encoding="utf-8")


def render_prompt(template: str, text_a: str, text_b: str) -> str:
    # plain replace: texts may contain braces
    return load_template(template).replace("{text_A}", text_a).replace("{text_B}", text_b)


def parse_verdict(reply: str) -> bool | None:
    """TRUE/FALSE verdict from a model reply, or None if there is none.

    A leading verdict wins; otherwise the first standalone TRUE or FALSE
    token anywhere in the reply is used.
    """
    m = _PREFIX.match(reply) or _TOKEN.search(reply)
    if m is None:
        return None
    return m.group(1).upper() == "TRUE"


@dataclass
class LlmOracleConfig:
    endpoint: str | None = None
    model: str | None = None
    api_key: str | None = field(default=None, repr=False)
    template: str = "formatted"
    timeout: float = 60.0
    max_retries: int = 5
    max_inflight: int = 8
    temperature: float = 0.0
    backoff_initial: float = 1.0
    backoff_factor: float = 2.0

    def __post_init__(self):
        self.endpoint = self.endpoint or os.environ.get("SSE_ENDPOINT")
        self.model = self.model or os.environ.get("SSE_MODEL")
        self.api_key = self.api_key or os.environ.get("SSE_API_KEY")
        if not self.endpoint:
            raise ValueError("LLM oracle needs an endpoint (--endpoint or SSE_ENDPOINT)")
        if not self.model:
            raise ValueError("LLM oracle needs a model name (--model or SSE_MODEL)")
        if self.template not in TEMPLATES:
            raise ValueError(f"unknown prompt template {self.template!r}; expected one of {TEMPLATES}")
        if self.max_retries < 1:
            raise ValueError("max_retries counts attempts and must be at least 1")


class LlmOracle(EdgeOracle):
    """Asks a chat-completion endpoint whether two texts imply each other.

    One single-turn request per judgement. Transport errors, rate limiting or
    server errors, and replies without a verdict are retried with exponential
    backoff; the last failure is raised once attempts run out.
    """

    def __init__(self, config: LlmOracleConfig, client: httpx.Client | None = None):
        self.cfg = config
        self._client = client or httpx.Client(timeout=config.timeout)

    def config(self) -> dict:
        return {
            "endpoint": self.cfg.endpoint,
            "model": self.cfg.model,
            "template": self.cfg.template,
            "temperature": self.cfg.temperature,
        }

    def request_body(self, text_a: str, text_b: str) -> dict:
        return {
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": render_prompt(self.cfg.template, text_a, text_b)}],
            "temperature": self.cfg.temperature,
        }

    def _post(self, body):
        headers = {"Content-Type": "application/json"}
        if self.cfg.api_key:
            headers["Authorization"] = f"Bearer {self.cfg.api_key}"
        try:
            resp = self._client.post(self.cfg.endpoint, json=body, headers=headers)
        except httpx.HTTPError as exc:
            raise LlmTransportError(f"request to {self.cfg.endpoint} failed: {exc}") from exc
        if resp.status_code != 200:
            raise LlmStatusError(f"endpoint returned HTTP {resp.status_code}", status_code=resp.status_code)
        try:
            return resp.json()["choices"][0]["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise UnparseableVerdictError(f"malformed completion payload: {exc}", reply=resp.text) from exc

    def judge(self, text_a: str, text_b: str) -> bool:
        body = self.request_body(text_a, text_b)
        delay = self.cfg.backoff_initial
        for attempt in range(1, self.cfg.max_retries + 1):
            try:
                reply = self._post(body)
                verdict = parse_verdict(reply)
                if verdict is None:
                    raise UnparseableVerdictError(f"no TRUE/FALSE verdict in reply {reply[:80]!r}", reply=reply)
                return verdict
            except LlmStatusError as exc:
                if exc.status_code != 429 and exc.status_code < 500:
                    raise
                err = exc
            except (LlmTransportError, UnparseableVerdictError) as exc:
                err = exc
            if attempt < self.cfg.max_retries:
                log.warning("attempt %d/%d failed (%s); retrying in %.1fs", attempt, self.cfg.max_retries, err, delay)
                time.sleep(delay)
                delay *= self.cfg.backoff_factor
        raise err

    def judge_pair(self, i, j, text_a, text_b) -> bool:
        return self.judge(text_a, text_b)

    def close(self):
        self._client.close()
