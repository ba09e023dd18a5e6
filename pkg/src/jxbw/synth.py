"""Deterministic synthetic JSONL corpora for tests and benchmarks."""

from __future__ import annotations

import json
import random

WORDS = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel",
         "india", "juliet", "kilo", "lima", "mike", "november", "oscar", "papa"]
CITIES = [f"city{i:03d}" for i in range(200)]
TAGS = ["red", "green", "blue", "cyan", "magenta", "yellow", "black", "white",
        "orange", "purple", "grey", "brown"]


def _scalar(rng: random.Random, vocab: list[str]):
    roll = rng.random()
    if roll < 0.45:
        return rng.choice(vocab)
    if roll < 0.75:
        return rng.randint(0, 20)
    if roll < 0.85:
        return rng.choice([True, False])
    if roll < 0.9:
        return None
    return round(rng.uniform(0, 10), 1)


def _distinct_kind(value) -> tuple:
    """Label-level identity of a value's root (for duplicate-free arrays)."""
    if isinstance(value, dict):
        return ("object",)
    if isinstance(value, list):
        return ("array",)
    if isinstance(value, bool) or value is None:
        return ("const", value)
    if isinstance(value, float) and value.is_integer():
        return ("number", int(value))
    return (type(value).__name__ if not isinstance(value, (int, float)) else "number", value)


def random_value(rng: random.Random, depth: int, keys: list[str], vocab: list[str],
                 distinct_arrays: bool = True):
    """A random JSON value; containers only while ``depth`` > 0."""
    roll = rng.random()
    if depth <= 0 or roll < 0.55:
        return _scalar(rng, vocab)
    if roll < 0.8:
        return random_object(rng, depth - 1, keys, vocab, distinct_arrays)
    n = rng.randint(0, 4)
    out, seen = [], set()
    for _ in range(n):
        v = random_value(rng, depth - 1, keys, vocab, distinct_arrays)
        kind = _distinct_kind(v)
        if distinct_arrays and kind in seen:
            continue
        seen.add(kind)
        out.append(v)
    return out


def random_object(rng: random.Random, depth: int, keys: list[str], vocab: list[str],
                  distinct_arrays: bool = True) -> dict:
    n = rng.randint(0, min(5, len(keys)))
    return {k: random_value(rng, depth, keys, vocab, distinct_arrays)
            for k in rng.sample(keys, n)}


def mixed_corpus(n_lines: int, seed: int = 0, depth: int = 3, distinct_arrays: bool = True,
                 n_keys: int = 8, n_words: int = 10) -> list[str]:
    """Objects, arrays and scalars mixed; arrays hold no two same-labeled elements
    when ``distinct_arrays`` is set."""
    rng = random.Random(seed)
    keys = [f"k{i}" for i in range(n_keys)]
    vocab = WORDS[:n_words]
    lines = []
    for _ in range(n_lines):
        obj = random_object(rng, depth, keys, vocab, distinct_arrays)
        if not obj:
            obj = {rng.choice(keys): _scalar(rng, vocab)}
        lines.append(json.dumps(obj, separators=(",", ":")))
    return lines


def similar_corpus(n_lines: int, seed: int = 0) -> list[str]:
    """Shared schema with low-cardinality values."""
    rng = random.Random(seed)
    lines = []
    for i in range(n_lines):
        obj = {
            "name": rng.choice(WORDS),
            "age": rng.randint(20, 29),
            "city": rng.choice(CITIES[:10]),
            "active": rng.random() < 0.5,
            "profile": {"level": rng.randint(1, 5), "team": rng.choice(WORDS[:4])},
            "tags": rng.sample(TAGS[:5], rng.randint(1, 2)),
        }
        lines.append(json.dumps(obj, separators=(",", ":")))
    return lines


def disjoint_corpus(n_lines: int) -> list[str]:
    """No label other than the root OBJECT appears in two lines."""
    lines = []
    for i in range(1, n_lines + 1):
        obj = {f"key{i}_a": f"value{i}_a", f"key{i}_b": {f"key{i}_c": f"value{i}_c"}}
        lines.append(json.dumps(obj, separators=(",", ":")))
    return lines


def wide_corpus(n_lines: int, seed: int = 0, n_scalar_keys: int = 22) -> list[str]:
    """Records with many scalar fields plus one nested object and one array."""
    rng = random.Random(seed)
    lines = []
    for i in range(1, n_lines + 1):
        obj = {"id": i, "city": rng.choice(CITIES), "name": rng.choice(WORDS) + str(rng.randint(0, 99))}
        for k in range(n_scalar_keys - 3):
            card = (5, 20, 100, 1000)[k % 4]
            if k % 7 == 3:
                obj[f"f{k:02d}"] = rng.random() < 0.5
            else:
                obj[f"f{k:02d}"] = f"v{rng.randrange(card)}" if k % 2 else rng.randrange(card)
        obj["address"] = {"zip": rng.randrange(1000), "street": f"s{rng.randrange(5000)}",
                          "geo": {"lat": rng.randrange(90), "lon": rng.randrange(180)}}
        obj["tags"] = rng.sample(TAGS, rng.randint(1, 3))
        lines.append(json.dumps(obj, separators=(",", ":")))
    return lines


def write_lines(path, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line + "\n")
