import pytest

from jxbw.baseline import embeds, find_candidates, mt_search, naive_search, subtree_ids, tree_id
from jxbw.ingest import OBJECT, parse_jsonl, parse_query
from jxbw.merge import merge_all

from conftest import PERSON_LINES

CASES = [
    ('{"name":"Bob","age":30}', [2]),
    ('{"person":{"name":"Alice"}}', [1]),
    ('{"age":30}', [1, 2]),
    ('30', [1, 2]),
    ('["reading"]', [1, 2]),
    ('["reading","cycling"]', [1]),
    ('["cycling","reading"]', []),
    ('{"hobbies":[]}', [1, 2]),
    ('{}', [1, 2]),
    ('{"name":"Carol"}', []),
    ('{"name":"Alice","age":31}', []),
]


@pytest.fixture(scope="module")
def corpus():
    trees = parse_jsonl(PERSON_LINES)
    return trees, merge_all(trees)


@pytest.mark.parametrize("query,expected", CASES)
def test_both_baselines(corpus, query, expected):
    trees, mt = corpus
    q = parse_query(query)
    assert naive_search(trees, q) == expected
    assert mt_search(mt, q) == expected


def test_tree_id_and_embeds(corpus):
    trees, _ = corpus
    assert [tree_id(t) for t in trees] == [1, 2]
    q = parse_query('["reading","cycling"]')
    arrays = [t.children[1].children[0] for t in trees]  # source order: person, hobbies
    assert embeds(arrays[0], q) and not embeds(arrays[1], q)
    assert not embeds(trees[0], q)  # anchored at the root


def test_candidates_and_subtree_ids(corpus):
    _, mt = corpus
    cands = find_candidates(mt, OBJECT)
    assert len(cands) == 2 and cands[0] is mt
    assert subtree_ids(mt) == {1, 2}
    assert subtree_ids(cands[1].children[1]) == {1, 2}


@pytest.mark.parametrize("lines,query,expected", [
    (['{"t":["a","b"]}', '{"t":["b","a"]}', '{"t":["a","x","b"]}'], '["a","b"]', [1, 3]),
    (['{"t":["a","a"]}', '{"t":["a"]}'], '["a","a"]', [1]),
    (['{"t":[{"k":1},{"k":2}]}', '{"t":[{"k":2},{"k":1}]}'], '[{"k":1},{"k":2}]', [1]),
    (['{"a":{"x":1},"b":2}', '{"a":{"y":1}}'], '{"a":{}}', [1, 2]),
    (['{"a":{"x":1}}', '{"a":{"x":2}}'], '{"a":{"x":1}}', [1]),
])
def test_order_and_containers(lines, query, expected):
    trees = parse_jsonl(lines)
    q = parse_query(query)
    assert naive_search(trees, q) == expected
    assert mt_search(merge_all(trees), q) == expected
