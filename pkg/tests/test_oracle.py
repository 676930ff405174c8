import json
import threading
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectral_entropy.assignment import ClusterAssignment
from spectral_entropy.oracle import (
    CachedOracle,
    EdgeOracle,
    LlmOracle,
    LlmOracleConfig,
    LlmStatusError,
    MockOracle,
    OracleError,
    UnparseableVerdictError,
    VerdictCache,
    build_adjacency,
    estimate_pq,
    pair_uniform,
    parse_verdict,
    render_prompt,
    text_digest,
)

PLAIN_AB = (
    "\n    You are a expert in logical deduction and you are given 2 piece of texts: TEXT A and TEXT B. \n"
    "    You are to identify if TEXT A implies TEXT B and TEXT B implies TEXT A at the same time. \n"
    "    \n"
    "    TEXT A: \n"
    "    alpha\n"
    "    \n"
    "    TEXT B:\n"
    "    beta\n"
    "    \n"
    "    ## OUTPUT\n"
    "    You are to return TRUE if TEXT A implies TEXT B and TEXT B implies TEXT A at the same time. \n"
    "    otherwise, you are to return FALSE \n"
)
FORMATTED_AB = (
    " " + PLAIN_AB + "    \n"
    "    ##FORMAT:\n"
    "    START with either TRUE or FALSE, then detail your reasoning\n"
)


class CountingOracle(EdgeOracle):
    """Deterministic text judge that counts its calls."""

    symmetric = True

    def __init__(self, tag="v1"):
        self.tag = tag
        self.calls = 0
        self._lock = threading.Lock()

    def judge_pair(self, i, j, text_a, text_b):
        with self._lock:
            self.calls += 1
        return text_a[0] == text_b[0]

    def config(self):
        return {"tag": self.tag}


class SlowOracle(CountingOracle):
    def judge_pair(self, i, j, text_a, text_b):
        # later pairs finish first so completion order differs from query order
        time.sleep(0.002 * ((7 * i + 3 * j) % 5))
        return super().judge_pair(i, j, text_a, text_b)


class FailingOracle(CountingOracle):
    def judge_pair(self, i, j, text_a, text_b):
        if (i, j) == (1, 2):
            raise OracleError("boom")
        return True


def blocks(*sizes):
    return ClusterAssignment(np.repeat(np.arange(len(sizes)), sizes))


# -- prompts and verdict parsing ----------------------------------------------


def test_prompts_byte_exact():
    assert render_prompt("plain", "alpha", "beta") == PLAIN_AB
    assert render_prompt("formatted", "alpha", "beta") == FORMATTED_AB


def test_prompt_keeps_braces():
    out = render_prompt("plain", "set {a, b} and {0}", "y")
    assert "    set {a, b} and {0}\n" in out
    assert "    y\n" in out


@pytest.mark.parametrize(
    "reply, verdict",
    [
        ("TRUE", True),
        ("FALSE", False),
        ("true, both say the same", True),
        ("FALSE -- TEXT A mentions rowing only", False),
        ("  **TRUE**\nreasoning", True),
        ("After thinking: FALSE.", False),
        ("The answer is maybe", None),
        ("", None),
        ("TRUEISH", None),
    ],
)
def test_parse_verdict(reply, verdict):
    assert parse_verdict(reply) is verdict


# -- mock oracle and adjacency ------------------------------------------------


def test_mock_extremes():
    truth = blocks(3, 3)
    o = MockOracle(truth, 1.0, 0.0)
    assert o.judge_pair(0, 1)
    assert not o.judge_pair(0, 4)
    E = build_adjacency(["t"] * 6, o)
    expected = np.kron(np.eye(2, dtype=int), np.ones((3, 3), dtype=int))
    np.fill_diagonal(expected, 0)
    assert np.array_equal(E, expected)


def test_mock_symmetric_and_vectorized():
    truth = blocks(4, 5, 6)
    o = MockOracle(truth, 0.6, 0.3, seed=9)
    for i in range(15):
        for j in range(15):
            if i != j:
                assert o.judge_pair(i, j) == o.judge_pair(j, i)
    assert np.array_equal(o.adjacency(), build_adjacency(["x"] * 15, o))


def test_mock_errors():
    o = MockOracle(blocks(2, 2), 0.5, 0.5)
    with pytest.raises(IndexError):
        o.judge_pair(0, 4)
    with pytest.raises(ValueError):
        o.judge_pair(1, 1)
    with pytest.raises(ValueError):
        MockOracle(blocks(2), 1.5, 0.0)


def test_pair_uniform_range():
    u = pair_uniform(3, np.arange(1000), np.arange(1000) + 1)
    assert u.min() >= 0 and u.max() < 1
    assert abs(u.mean() - 0.5) < 0.05
    assert pair_uniform(3, 5, 2) == pair_uniform(3, 2, 5)


def test_query_counts():
    o = CountingOracle()
    build_adjacency(["a", "b"], o, "single")
    assert o.calls == 1
    build_adjacency(["a", "b"], o, "and")
    assert o.calls == 3


def test_policies_differ_for_asymmetric_judge():
    class Directed(CountingOracle):
        symmetric = False

        def judge_pair(self, i, j, a, b):
            return i < j

    texts = ["a", "b", "c"]
    assert build_adjacency(texts, Directed(), "and").sum() == 0
    assert build_adjacency(texts, Directed(), "or").sum() == 6


def test_concurrency_order_invariance():
    texts = [f"{c}{k}" for c in "abcd" for k in range(5)]
    E1 = build_adjacency(texts, SlowOracle(), max_inflight=1)
    E8 = build_adjacency(texts, SlowOracle(), max_inflight=8)
    assert np.array_equal(E1, E8)


def test_oracle_error_names_pair():
    with pytest.raises(OracleError) as info:
        build_adjacency(["a", "b", "c"], FailingOracle())
    assert info.value.pair == (1, 2)


def test_build_needs_two_texts():
    with pytest.raises(ValueError):
        build_adjacency(["only"], CountingOracle())


def test_estimate_pq_exact_and_empty():
    truth = blocks(3, 3)
    E = build_adjacency(["t"] * 6, MockOracle(truth, 1.0, 0.0))
    est = estimate_pq(E, truth)
    assert (est.p_hat, est.q_hat) == (1.0, 0.0)
    assert (est.within_pairs, est.between_pairs) == (6, 9)
    est = estimate_pq(np.zeros((6, 6), dtype=int), truth)
    assert (est.p_hat, est.q_hat) == (0.0, 0.0)
    with pytest.raises(ValueError):
        estimate_pq(np.zeros((3, 3)), blocks(3))


def test_mock_rates_a21():
    truth = blocks(6, 9, 15)
    ps, qs = [], []
    for seed in range(200):
        est = estimate_pq(MockOracle(truth, 0.96, 0.15, seed).adjacency(), truth)
        ps.append(est.p_hat)
        qs.append(est.q_hat)
    assert 0.93 <= np.mean(ps) <= 0.99
    assert 0.12 <= np.mean(qs) <= 0.18


def test_mock_rates_llama_events():
    truth = blocks(10, 10, 10)
    ps = [estimate_pq(MockOracle(truth, 0.75, 0.0, s).adjacency(), truth).p_hat for s in range(100)]
    assert 0.72 <= np.mean(ps) <= 0.78


# -- LLM client against a local canned server ---------------------------------


def llm(server, **kw):
    cfg = LlmOracleConfig(endpoint=server.url, model="m", api_key="k", backoff_initial=0.0, **kw)
    return LlmOracle(cfg)


def test_llm_true_false(canned_server):
    o = llm(canned_server)
    canned_server.queue[:] = [(200, "TRUE"), (200, "FALSE -- TEXT A mentions more")]
    assert o.judge("a", "b") is True
    assert o.judge("a", "c") is False
    req = canned_server.requests[0]
    assert req["body"]["model"] == "m"
    assert req["body"]["temperature"] == 0
    assert req["body"]["messages"][0]["content"] == render_prompt("formatted", "a", "b")
    assert req["headers"]["Authorization"] == "Bearer k"


def test_llm_garbage_retries_then_fails(canned_server):
    o = llm(canned_server, max_retries=3)
    canned_server.default = (200, "The answer is maybe")
    with pytest.raises(UnparseableVerdictError):
        o.judge("a", "b")
    assert len(canned_server.requests) == 3


def test_llm_retries_server_errors(canned_server):
    o = llm(canned_server)
    canned_server.queue[:] = [(503, ""), (429, ""), (200, "TRUE")]
    assert o.judge("a", "b") is True
    assert len(canned_server.requests) == 3


def test_llm_client_error_not_retried(canned_server):
    o = llm(canned_server)
    canned_server.queue[:] = [(401, "")]
    with pytest.raises(LlmStatusError) as info:
        o.judge("a", "b")
    assert info.value.status_code == 401
    assert len(canned_server.requests) == 1


def test_llm_config_from_env(monkeypatch):
    monkeypatch.setenv("SSE_ENDPOINT", "http://x/v1")
    monkeypatch.setenv("SSE_MODEL", "envmodel")
    monkeypatch.setenv("SSE_API_KEY", "secret")
    cfg = LlmOracleConfig()
    assert (cfg.endpoint, cfg.model, cfg.api_key) == ("http://x/v1", "envmodel", "secret")
    assert "secret" not in repr(cfg)
    monkeypatch.delenv("SSE_MODEL")
    with pytest.raises(ValueError, match="model"):
        LlmOracleConfig()


def test_llm_fingerprint_tracks_model(canned_server):
    a = llm(canned_server)
    b = LlmOracle(LlmOracleConfig(endpoint=canned_server.url, model="other"))
    assert a.fingerprint != b.fingerprint
    assert len(a.fingerprint) == 16


# -- cache --------------------------------------------------------------------


def test_cache_second_build_is_free(tmp_path):
    inner = CountingOracle()
    texts = ["a1", "a2", "b1", "b2", "c"]
    first = build_adjacency(texts, CachedOracle(inner, VerdictCache(tmp_path / "c.ndjson")))
    calls = inner.calls
    again = CachedOracle(inner, VerdictCache(tmp_path / "c.ndjson"))
    second = build_adjacency(texts, again)
    assert np.array_equal(first, second)
    assert inner.calls == calls
    assert again.hits == 10 and again.misses == 0


def test_cache_fingerprint_change_requeries(tmp_path):
    store = VerdictCache(tmp_path / "c.ndjson")
    build_adjacency(["a", "b", "c"], CachedOracle(CountingOracle("v1"), store))
    other = CountingOracle("v2")
    build_adjacency(["a", "b", "c"], CachedOracle(other, store))
    assert other.calls == 3


def test_cache_drops_corrupt_lines(tmp_path, caplog):
    path = tmp_path / "c.ndjson"
    store = VerdictCache(path)
    store.put("fp", text_digest("a"), text_digest("b"), True, timestamp=1.0)
    with open(path, "a") as fh:
        fh.write("{not json\n")
        fh.write(json.dumps({"fingerprint": "fp", "verdict": "yes"}) + "\n")
    loaded = VerdictCache(path)
    assert len(loaded) == 1
    assert loaded.get("fp", text_digest("a"), text_digest("b")) is True
    assert "corrupt" in caplog.text


records = st.lists(
    st.tuples(
        st.text(alphabet="0123456789abcdef", min_size=1, max_size=16),
        st.text(max_size=20),
        st.text(max_size=20),
        st.booleans(),
        st.floats(0, 2e9, allow_nan=False),
    ),
    max_size=30,
)


@given(records)
def test_cache_round_trip_bit_exact(tmp_path_factory, recs):
    d = tmp_path_factory.mktemp("cache")
    store = VerdictCache()
    for fp, a, b, v, ts in recs:
        store.put(fp, text_digest(a), text_digest(b), v, timestamp=ts)
    store.save(d / "one.ndjson")
    loaded = VerdictCache(d / "one.ndjson")
    assert loaded.records() == store.records()
    loaded.save(d / "two.ndjson")
    assert (d / "one.ndjson").read_bytes() == (d / "two.ndjson").read_bytes()
