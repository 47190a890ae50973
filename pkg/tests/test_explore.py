import math
from collections import Counter

import pytest

from localrank.explore import (
    ALL_QUERIES,
    DiscoveryError,
    ModelError,
    Query,
    cost,
    open_session,
    parse_model,
    q_crawl,
    q_jump,
    q_links,
)
from localrank.graph import DirectedGraph, InvalidNodeError
from localrank.instances import gen_eluders


def within_5_sigma(count, trials, p):
    return abs(count - trials * p) <= 5 * math.sqrt(trials * p * (1 - p))


def test_open_session_state():
    g = DirectedGraph(4, [(0, 1), (2, 3)])
    s = open_session(g, [0, 3], seed=4)
    assert cost(s) == 0
    assert s.discovered == set(s.targets)
    assert [s.internal_id(t) for t in s.targets] == [0, 3]
    assert sorted(s.external_id(i) for i in range(4)) == [0, 1, 2, 3]
    with pytest.raises(InvalidNodeError):
        open_session(g, [9])
    with pytest.raises(ModelError):
        open_session(g, [0], model=Query(0))


def test_same_seed_same_transcript():
    g = gen_eluders(4, 0.5).graph
    runs = []
    for _ in range(2):
        s = open_session(g, [0, 1], seed=7)
        seq = []
        for _ in range(50):
            x = q_jump(s).nodes[0]
            seq.append(x)
            seq.append(q_crawl(s, x).children)
        runs.append((s.targets, seq))
    assert runs[0] == runs[1]


def test_model_gating_does_not_bill():
    g = DirectedGraph(2, [(0, 1)])
    s = open_session(g, [0], model="crawl", seed=0)
    with pytest.raises(ModelError):
        q_jump(s)
    with pytest.raises(ModelError):
        q_links(s, s.targets[0])
    assert cost(s) == 0
    assert parse_model("links,jump") == Query.LINKS | Query.JUMP


def test_links_on_twin(twin_g1):
    s = open_session(twin_g1, [0, 3], seed=1)
    eu = s.targets[0]
    res = q_links(s, eu)
    assert sorted(s.internal_id(p) for p in res.parents) == [1, 2]
    assert res.children == ()
    assert set(res.nodes) <= s.discovered
    assert cost(s) == 1


def test_links_isolated_and_self_loop():
    g = DirectedGraph(2, [(1, 1)])
    s = open_session(g, [0, 1], seed=2)
    a, b = s.targets
    assert q_links(s, a).parents == () and q_links(s, a).children == ()
    res = q_links(s, b)
    assert res.parents == (b,) and res.children == (b,)


def test_undiscovered_query_rejected_without_charge():
    g = DirectedGraph(3, [(0, 1), (1, 2)])
    s = open_session(g, [0], seed=0)
    with pytest.raises(DiscoveryError):
        q_crawl(s, s.external_id(2))
    assert cost(s) == 0
    q_links(s, s.targets[0])
    assert s.external_id(1) in s.discovered and s.external_id(2) not in s.discovered


def test_links_then_failed_crawl_bills_once():
    g = DirectedGraph(3, [(0, 1)])
    s = open_session(g, [0], seed=3)
    q_links(s, s.targets[0])
    with pytest.raises(DiscoveryError):
        q_crawl(s, s.external_id(2))
    assert cost(s) == 1


def test_crawl_dangling_and_single_child():
    g = DirectedGraph(2, [(0, 1)])
    s = open_session(g, [0, 1], seed=0)
    a, b = s.targets
    assert q_crawl(s, b).nodes == ()
    assert all(q_crawl(s, a).children == (b,) for _ in range(20))


def test_crawl_uniform_over_children():
    g = DirectedGraph(3, [(0, 1), (0, 2)])
    s = open_session(g, [0], seed=5)
    counts = Counter(s.internal_id(q_crawl(s, s.targets[0]).children[0]) for _ in range(10000))
    assert within_5_sigma(counts[1], 10000, 0.5)


def test_jump_uniform_and_arcless():
    g = DirectedGraph(3, [(0, 1), (1, 2)])
    s = open_session(g, [0], seed=9)
    counts = Counter()
    for _ in range(30000):
        res = q_jump(s)
        assert res.arcs == () and len(res.nodes) == 1
        counts[res.nodes[0]] += 1
    assert all(within_5_sigma(c, 30000, 1 / 3) for c in counts.values())
    assert cost(s) == 30000
    one = open_session(DirectedGraph(1), [0], seed=1)
    assert {q_jump(one).nodes[0] for _ in range(10)} == {one.targets[0]}


def test_discovery_closure_and_billing():
    g = gen_eluders(3, 0.5).graph
    s = open_session(g, [0, 1], ALL_QUERIES, seed=11)
    seen = set(s.targets)
    for _ in range(40):
        res = q_jump(s)
        seen.update(res.nodes)
        res = q_crawl(s, res.nodes[0])
        seen.update(res.nodes)
    res = q_links(s, s.targets[0])
    seen.update(res.nodes)
    assert s.discovered == seen
    assert cost(s) == 81


def test_permutation_opacity_on_symmetric_parents():
    # All parents of u are interchangeable, so which internal node a crawl
    # lands on must not be predictable from its external id.
    b = gen_eluders(5, 0.5)
    firsts = Counter()
    for seed in range(200):
        s = open_session(b.graph, b.targets, Query.LINKS, seed)
        res = q_links(s, s.targets[0])
        firsts[s.internal_id(min(p for p in res.parents if p != s.targets[0]))] += 1
    assert len(firsts) >= 5
