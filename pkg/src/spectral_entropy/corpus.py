"""Synthetic text collections with known semantic clusters.

A text is a sentence listing ``M`` items drawn from an item list. Two texts
mean the same thing exactly when they list the same set of items, whatever the
order and whichever synonym was used for each item. A collection picks ``K``
distinct item subsets and writes ``n_k`` texts for subset ``k``.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

import numpy as np

from .assignment import ClusterAssignment
from .entropy import as_probabilities

SEPARATOR = " / "

HOBBY_TEMPLATES = (
    "In his free time, John likes {items} as his hobbies.",
    "John's hobbies include {items}.",
    "{Items} are what John enjoys doing in his free time.",
)
EVENT_TEMPLATES = (
    "On December 3, {items}.",
    "Events that happened on December 3 include the following: {items}.",
    "{Items}: all of these happened on December 3.",
)


@dataclass(frozen=True)
class ItemList:
    """``items[k]`` holds the interchangeable phrasings of canonical item ``k``."""

    name: str
    items: tuple[tuple[str, ...], ...]
    templates: tuple[str, ...] = HOBBY_TEMPLATES
    separator: str = ", "

    def __post_init__(self):
        if not self.items:
            raise ValueError("item list is empty")
        if any(not group for group in self.items):
            raise ValueError("every item needs at least one phrasing")
        canon = [group[0] for group in self.items]
        if len(set(canon)) != len(canon):
            raise ValueError("duplicate canonical items")

    @property
    def N(self) -> int:
        return len(self.items)


def parse_item_list(text: str, name: str, **kw) -> ItemList:
    items = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        items.append(tuple(s.strip() for s in line.split(SEPARATOR) if s.strip()))
    return ItemList(name, tuple(items), **kw)


def load_item_list(path: str | os.PathLike, name: str | None = None, **kw) -> ItemList:
    """Read an item list: one item per line, phrasings separated by ``" / "``, ``#`` comments."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_item_list(text, name or os.path.splitext(os.path.basename(path))[0], **kw)


def builtin_lists() -> dict[str, ItemList]:
    data = resources.files(__package__).joinpath("data")
    return {
        "hobbies": parse_item_list(data.joinpath("hobbies.txt").read_text(encoding="utf-8"), "hobbies"),
        "events": parse_item_list(
            data.joinpath("events.txt").read_text(encoding="utf-8"),
            "events",
            templates=EVENT_TEMPLATES,
            separator="; ",
        ),
    }


def allocate_counts(ratios, n: int) -> np.ndarray:
    """Split ``n`` by ``ratios`` with largest-remainder rounding (ties to the lower index)."""
    r = as_probabilities(ratios)
    if n < 1:
        raise ValueError("n must be positive")
    quota = r * n
    base = np.floor(quota + 1e-9).astype(np.int64)
    rem = quota - base
    short = n - int(base.sum())
    order = np.lexsort((np.arange(r.size), -np.round(rem, 12)))
    base[order[:short]] += 1
    return base


def _join(phrases: Sequence[str], sep: str) -> str:
    phrases = [p.rstrip(".") if sep != ", " else p for p in phrases]
    if len(phrases) == 1:
        return phrases[0]
    if len(phrases) == 2:
        return f"{phrases[0]} and {phrases[1]}"
    return sep.join(phrases[:-1]) + f"{sep}and {phrases[-1]}"


def render(template: str, phrases: Sequence[str], sep: str) -> str:
    listed = _join(phrases, sep)
    return template.format(items=listed, Items=listed[:1].upper() + listed[1:])


@dataclass(frozen=True)
class GeneratedText:
    collection: str
    index: int
    label: int
    subset: frozenset
    order: tuple[int, ...]
    text: str


@dataclass(frozen=True)
class GeneratedCollection:
    records: tuple[GeneratedText, ...]
    truth: ClusterAssignment
    subsets: tuple[tuple[int, ...], ...]
    config: dict

    @property
    def texts(self) -> list[str]:
        return [r.text for r in self.records]

    @property
    def n(self) -> int:
        return len(self.records)


def _distinct_subsets(rng, N, M, K):
    total = math.comb(N, M)
    if K > total:
        raise ValueError(f"cannot pick {K} distinct {M}-subsets from {N} items (only {total} exist)")
    chosen: list[tuple[int, ...]] = []
    while len(chosen) < K:
        s = tuple(sorted(rng.choice(N, size=M, replace=False).tolist()))
        if s not in chosen:
            chosen.append(s)
    return chosen


def generate_collection(
    items: ItemList,
    M: int,
    ratios,
    n: int,
    seed: int = 0,
    template: str = "canonical",
) -> GeneratedCollection:
    """Write ``n`` texts in ``len(ratios)`` semantic clusters.

    Every text lists its cluster's ``M`` items in a fresh random order, each
    with a uniformly chosen phrasing. ``template="canonical"`` always uses the
    list's first sentence form; ``"varied"`` picks one of its forms per text.
    Texts come out grouped by cluster.
    """
    if not 1 <= M <= items.N:
        raise ValueError(f"M must satisfy 1 <= M <= {items.N}, got {M}")
    if template not in ("canonical", "varied"):
        raise ValueError(f"unknown template mode {template!r}")
    counts = allocate_counts(ratios, n)
    config = {
        "list": items.name,
        "M": M,
        "ratios": [float(r) for r in ratios],
        "n": n,
        "seed": seed,
        "template": template,
    }
    cid = hashlib.sha256(json.dumps({**config, "items": items.items}, sort_keys=True).encode()).hexdigest()[:12]

    rng = np.random.default_rng(seed)
    subsets = _distinct_subsets(rng, items.N, M, len(counts))
    records = []
    labels = np.repeat(np.arange(len(counts)), counts)
    for idx, k in enumerate(labels.tolist()):
        order = tuple(rng.permutation(subsets[k]).tolist())
        phrases = [items.items[i][rng.integers(len(items.items[i]))] for i in order]
        form = items.templates[0] if template == "canonical" else items.templates[rng.integers(len(items.templates))]
        text = render(form, phrases, items.separator)
        records.append(GeneratedText(cid, idx, k, frozenset(subsets[k]), order, text))
    return GeneratedCollection(tuple(records), ClusterAssignment(labels, len(counts)), tuple(subsets), config)


def true_equivalent(a: GeneratedText, b: GeneratedText) -> bool:
    """Ground-truth equivalence: same item set, ignoring order and phrasing."""
    if a.collection != b.collection:
        raise ValueError("texts come from different collections")
    return a.subset == b.subset
