import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jxbw.baseline import mt_search, naive_search
from jxbw.engine import (QueryStats, StructMatcher, collect_path_matching_ids, comp_ancestors,
                         decompose_paths, substructure_search, to_symbols)
from jxbw.ingest import parse_query
from jxbw.querygen import miss_queries, random_queries
from jxbw.synth import mixed_corpus

from conftest import A, G, H, I, K, build

BOB = '{"name":"Bob","age":30}'


def test_worked_example_steps(person):
    ix = person.index
    q = parse_query(BOB)
    paths = decompose_paths(q, person.symtab).paths
    assert sorted(paths) == sorted([(A, I, K), (A, G, H)])
    assert [ix.locate_path(p) for p in paths] == [(12, 12), (10, 10)]
    roots = [comp_ancestors(ix, p).tolist() for p in paths]
    assert roots == [[9], [9]]
    sets = collect_path_matching_ids(ix, 9, paths)
    assert [s.tolist() for s in sets] == [[2], [1, 2]]
    stats = QueryStats()
    assert substructure_search(ix, q, stats) == [2]
    assert stats.as_dict()["route"] == "paths" and stats.p == 2 and stats.c == 1


PERSON_CASES = [
    (BOB, [2]),
    ('{"name":"Alice","age":30}', [1]),
    ('{"name":"Carol"}', []),
    ('{"age":31}', []),
    ("30", [1, 2]),
    ('"Bob"', [2]),
    ("{}", [1, 2]),
    ("[]", [1, 2]),
    ('{"hobbies":["reading"]}', [1, 2]),
    ('{"hobbies":["reading","cycling"]}', [1]),
    ('["cycling","reading"]', []),
    ('{"person":{"name":"Bob"},"hobbies":["reading"]}', [2]),
    ('{"person":{"name":"Bob"},"hobbies":["cycling"]}', []),
]
# the path route does not check element order, so it only runs on array-free queries
ROUTED = [(q, e, r) for q, e in PERSON_CASES for r in ("auto", "paths", "struct")
          if r != "paths" or "[" not in q]


@pytest.mark.parametrize("query,expected,route", ROUTED)
def test_person_queries(person, query, expected, route):
    q = parse_query(query)
    assert substructure_search(person.index, q, route=route) == expected
    assert naive_search(person.trees, q) == expected
    assert mt_search(person.mt, q) == expected


def test_unknown_label_is_empty(person):
    assert substructure_search(person.index, parse_query('{"nope":1}')) == []


def test_struct_matcher_direct(person):
    q = to_symbols(parse_query(BOB), person.symtab)
    m = StructMatcher(person.index)
    sets = m.struct_match(9, q)
    assert sorted(s.tolist() for s in sets) == [[1, 2], [2]]
    assert m.struct_match(1, q) is None


def test_order_preserving_arrays():
    b = build(['{"t":["a","b"]}', '{"t":["b","a"]}', '{"t":["a","c","b"]}', '{"t":["b"]}'])
    for query, expected in [('["a","b"]', [1, 3]), ('["b","a"]', [2]), ('["b"]', [1, 2, 3, 4]),
                            ('{"t":["a","b"]}', [1, 3]), ('["a","a"]', [])]:
        q = parse_query(query)
        assert substructure_search(b.index, q) == expected == naive_search(b.trees, q)


def test_duplicate_keys_handled():
    b = build(['{"a":{"x":1},"a":{"y":2}}', '{"a":{"x":1,"y":2}}'])
    assert b.index.duplicate_keys
    q = parse_query('{"a":{"x":1,"y":2}}')
    assert substructure_search(b.index, q) == [2] == naive_search(b.trees, q)


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("distinct", [True, False])
def test_agrees_with_baselines(seed, distinct):
    lines = mixed_corpus(50, seed=seed, distinct_arrays=distinct, n_keys=4, n_words=4)
    b = build(lines)
    hits = random_queries(b.trees, 30, seed=seed)
    queries = hits + miss_queries(b.trees, hits, 10, seed=seed)
    for text in queries:
        q = parse_query(text)
        expected = naive_search(b.trees, q)
        assert substructure_search(b.index, q) == expected, text
        assert substructure_search(b.index, q, route="struct") == expected, text
        assert mt_search(b.mt, q) == expected, text
    for text in hits:
        assert naive_search(b.trees, parse_query(text))


_SCALARS = st.sampled_from(["1", "2", '"x"', '"y"', "true", "null"])
_VALUES = st.recursive(
    _SCALARS,
    lambda inner: st.lists(inner, max_size=3).map(lambda xs: "[" + ",".join(xs) + "]")
    | st.lists(st.tuples(st.sampled_from("abc"), inner), max_size=3).map(
        lambda kv: "{" + ",".join(f'"{k}":{v}' for k, v in kv) + "}"),
    max_leaves=8,
)


@pytest.fixture(scope="module")
def fuzz_corpus():
    rng = random.Random(11)
    lines = []
    for _ in range(40):
        parts = [f'"{rng.choice("abc")}":{rng.choice(["1", "2", "[1,2]", "[2,1]", "{}", "[]"])}'
                 for _ in range(rng.randint(1, 3))]
        nested = rng.choice(["", ',"d":{"a":1,"b":[\"x\",\"y\"]}', ',"d":[{"a":2},{"a":1}]'])
        lines.append("{" + ",".join(parts) + nested + "}")
    return build(lines)


@settings(max_examples=150, deadline=None)
@given(_VALUES)
def test_free_form_queries(fuzz_corpus, text):
    q = parse_query(text)
    expected = naive_search(fuzz_corpus.trees, q)
    assert substructure_search(fuzz_corpus.index, q) == expected
    assert mt_search(fuzz_corpus.mt, q) == expected
