from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time

from .base import EdgeOracle

log = logging.getLogger(__name__)

FIELDS = ("fingerprint", "digest_a", "digest_b", "verdict", "timestamp")


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _encode(record: dict) -> str:
    return json.dumps({k: record[k] for k in FIELDS}, separators=(",", ":")) + "\n"


def _decode(line: str) -> dict:
    rec = json.loads(line)
    if not isinstance(rec, dict) or set(rec) != set(FIELDS):
        raise ValueError("wrong fields")
    if not isinstance(rec["verdict"], bool):
        raise ValueError("verdict is not a boolean")
    for k in ("fingerprint", "digest_a", "digest_b"):
        if not isinstance(rec[k], str):
            raise ValueError(f"{k} is not a string")
    if not isinstance(rec["timestamp"], (int, float)):
        raise ValueError("timestamp is not a number")
    return rec


class VerdictCache:
    """Append-only store of verdicts in a newline-delimited JSON file.

    Records are keyed by ``(fingerprint, digest_a, digest_b)``. Lines that do
    not parse are skipped with a warning, so their pairs get re-queried.
    ``path=None`` keeps everything in memory.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = path
        self._records: dict[tuple, dict] = {}
        self._lock = threading.Lock()
        if path is not None and os.path.exists(path):
            self._load(path)

    def _load(self, path):
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = _decode(line)
                except (ValueError, TypeError) as exc:
                    log.warning("dropping corrupt cache entry %s:%d (%s)", path, lineno, exc)
                    continue
                self._records[rec["fingerprint"], rec["digest_a"], rec["digest_b"]] = rec

    def __len__(self):
        return len(self._records)

    def records(self) -> list[dict]:
        return list(self._records.values())

    def get(self, fingerprint, digest_a, digest_b):
        rec = self._records.get((fingerprint, digest_a, digest_b))
        return None if rec is None else rec["verdict"]

    def put(self, fingerprint, digest_a, digest_b, verdict: bool, timestamp: float | None = None):
        rec = {
            "fingerprint": fingerprint,
            "digest_a": digest_a,
            "digest_b": digest_b,
            "verdict": bool(verdict),
            "timestamp": time.time() if timestamp is None else timestamp,
        }
        with self._lock:
            self._records[fingerprint, digest_a, digest_b] = rec
            if self.path is not None:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(_encode(rec))

    def save(self, path):
        """Write every live record to ``path`` (compacting duplicates)."""
        with open(path, "w", encoding="utf-8") as fh:
            for rec in self._records.values():
                fh.write(_encode(rec))


class CachedOracle(EdgeOracle):
    """Wraps an oracle so each (oracle, ordered text pair) is asked only once.

    Keys use content digests of the texts, so identical texts share verdicts.
    That is the right behaviour for text-based judges; index-based simulated
    judges should not be cached when a collection contains duplicate texts.
    """

    def __init__(self, inner: EdgeOracle, store: VerdictCache):
        self.inner = inner
        self.store = store
        self.symmetric = inner.symmetric
        self.hits = 0
        self.misses = 0

    def config(self) -> dict:
        return self.inner.config()

    @property
    def fingerprint(self) -> str:
        return self.inner.fingerprint

    def _lookup(self, text_a, text_b, ask):
        fp = self.inner.fingerprint
        da, db = text_digest(text_a), text_digest(text_b)
        hit = self.store.get(fp, da, db)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        verdict = bool(ask())
        self.store.put(fp, da, db, verdict)
        return verdict

    def judge_pair(self, i, j, text_a, text_b) -> bool:
        return self._lookup(text_a, text_b, lambda: self.inner.judge_pair(i, j, text_a, text_b))

    def judge(self, text_a, text_b) -> bool:
        return self._lookup(text_a, text_b, lambda: self.inner.judge(text_a, text_b))
