import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from localrank.graph import (
    DirectedGraph,
    InvalidNodeError,
    RankingParams,
    exact_pagerank,
    is_valid_ranking,
    pagerank_of,
    separated,
)
from localrank.instances import reduce_domset
from localrank.rank_subgraph import (
    BudgetError,
    RankGraphVerdict,
    StructuralError,
    VisitSubgraph,
    adversarial_witness,
    check_compatible,
    induced_visit_subgraph,
    kernel_scores,
    min_ranking_subgraph,
    rankgraph_decide,
    union_visit,
    verify_ranking_order,
    verify_ranking_subgraph,
)

from conftest import TWIN_KERNEL, domset_example_source, random_graph
from oracles import brute_min_kernel, kernel_score_oracle

A03 = RankingParams(Fraction(3, 10))
HALF = RankingParams(Fraction(1, 2))


def relabeled(h, index):
    return VisitSubgraph({index[x] for x in h.kernel}, {index[x] for x in h.frontier}, {(index[s], index[t]) for s, t in h.arcs})


def test_twin_induced(twin_g1):
    h = induced_visit_subgraph(twin_g1, TWIN_KERNEL)
    assert h.frontier == {2, 4}
    assert h.arcs == {(1, 0), (2, 0), (3, 3), (4, 3)}
    assert len(h) == 5


def test_induced_edge_cases():
    g = DirectedGraph(3, [(0, 1), (1, 2), (2, 0)])
    h = induced_visit_subgraph(g, range(3))
    assert not h.frontier and h.arcs == set(g.arcs)
    iso = induced_visit_subgraph(DirectedGraph(2, [(1, 1)]), [0])
    assert len(iso) == 1 and not iso.arcs
    with pytest.raises(StructuralError):
        induced_visit_subgraph(g, [])


def test_visit_subgraph_invariants():
    with pytest.raises(StructuralError):
        VisitSubgraph({0}, {1, 2}, {(0, 1), (1, 2), (2, 0)})
    with pytest.raises(StructuralError):
        VisitSubgraph({0}, {1, 2}, {(0, 1)})


def test_twin_compatible_with_both(twin_g1, twin_g2):
    h = induced_visit_subgraph(twin_g1, TWIN_KERNEL)
    assert check_compatible(h, twin_g1) and check_compatible(h, twin_g2)
    cut = DirectedGraph(twin_g1.node_count, [a for a in twin_g1.arcs if a != (1, 0)])
    assert not check_compatible(h, cut)
    with pytest.raises(InvalidNodeError):
        check_compatible(VisitSubgraph({0}, {40}, {(40, 0)}), twin_g1)


def test_union_examples(twin_g1):
    h1 = induced_visit_subgraph(twin_g1, {0, 1})
    h2 = induced_visit_subgraph(twin_g1, {2, 3})
    assert union_visit(h1, h1) == h1
    u = union_visit(h1, h2)
    assert u == induced_visit_subgraph(twin_g1, {0, 1, 2, 3})
    assert 2 in h1.frontier and 2 in u.kernel


def test_twin_kernel_scores(twin_g1):
    h = induced_visit_subgraph(twin_g1, TWIN_KERNEL)
    ks = kernel_scores(h, A03, [0, 3])
    assert ks[0] == Fraction(91, 500) and ks[3] == Fraction(1, 5)
    assert ks[0] == kernel_score_oracle(h, Fraction(3, 10), 0)
    fl = kernel_scores(h, A03, [0, 3], "float")
    assert abs(fl[0] - 0.182) < 1e-12 and abs(fl[3] - 0.2) < 1e-12
    assert ks[3] == sum(ks.contrib[3].values())
    with pytest.raises(InvalidNodeError):
        kernel_scores(h, A03, [2])


def test_kernel_scores_full_kernel_equal_pagerank():
    rng = random.Random(2)
    for _ in range(10):
        g = random_graph(rng, 7)
        h = induced_visit_subgraph(g, range(g.node_count))
        ks = kernel_scores(h, HALF, list(range(g.node_count)))
        assert [ks[v] for v in range(g.node_count)] == list(exact_pagerank(g, HALF, "rational"))


def test_kernel_node_with_only_frontier_parents():
    g = DirectedGraph(3, [(1, 0), (2, 0)])
    h = induced_visit_subgraph(g, [0])
    assert kernel_scores(h, HALF, [0])[0] == Fraction(1, 2) / 3


def test_twin_rejected_both_ways(twin_g1, twin_g2):
    h = induced_visit_subgraph(twin_g1, TWIN_KERNEL)
    up = verify_ranking_subgraph(h, 0, 3, A03)
    assert (up.is_ranking_subgraph, up.failing_condition) == (False, "COND1")
    down = verify_ranking_subgraph(h, 3, 0, A03)
    assert (down.failing_condition, down.witness) == ("COND2", 2)
    s1 = exact_pagerank(twin_g1, A03, "rational")
    s2 = exact_pagerank(twin_g2, A03, "rational")
    assert s1[0] > s1[3] and s2[0] < s2[3]


def test_full_kernel_verdict_matches_exact_scores():
    g = DirectedGraph(3, [(0, 0), (1, 0), (2, 2)])
    h = induced_visit_subgraph(g, range(3))
    assert verify_ranking_subgraph(h, 0, 2, HALF).is_ranking_subgraph
    assert not verify_ranking_subgraph(h, 2, 0, HALF).is_ranking_subgraph


def test_two_star_example(two_star):
    h = induced_visit_subgraph(two_star, {0, 1, 3, 4})
    assert verify_ranking_subgraph(h, 0, 3, HALF).is_ranking_subgraph
    res = min_ranking_subgraph(two_star, [0, 3], HALF)
    assert res.size == 4 and res.kernel == {0, 1, 3, 4}
    assert res.order == (0, 3)
    assert len(brute_min_kernel(two_star, [0, 3], HALF, (0, 3))) == 4


def test_witness_twin_cond1(twin_g1):
    h = induced_visit_subgraph(twin_g1, TWIN_KERNEL)
    verdict = verify_ranking_subgraph(h, 0, 3, A03)
    w = adversarial_witness(h, verdict, A03)
    assert check_compatible(relabeled(h, w.index), w.graph)
    sc = pagerank_of(w.graph, A03, [w.index[0], w.index[3]], "rational")
    assert sc[w.index[3]] > sc[w.index[0]]


def test_witness_twin_cond2(twin_g1):
    h = induced_visit_subgraph(twin_g1, TWIN_KERNEL)
    verdict = verify_ranking_subgraph(h, 3, 0, A03)
    w = adversarial_witness(h, verdict, A03)
    g = w.graph
    assert check_compatible(relabeled(h, w.index), g)
    sc = pagerank_of(g, A03, [w.index[0], w.index[3]], "rational")
    assert sc[w.index[0]] > sc[w.index[3]]
    assert g.in_degree(w.index[2]) > 0


def test_witness_requires_failure():
    with pytest.raises(ValueError):
        adversarial_witness(VisitSubgraph({0}, (), ()), RankGraphVerdict(True, None, None, (0, 0)), HALF)


def test_domset_example_min_kernel():
    r = reduce_domset(domset_example_source(), 2, Fraction(1, 2))
    res = min_ranking_subgraph(r.graph, r.targets, r.params, order=(r.u, r.v))
    w = r.sinks["w"]
    assert res.size == 5
    assert res.kernel == {0, 2, r.u, r.v, w}


def test_budget_is_enforced():
    g = DirectedGraph(30, [(i, 0) for i in range(1, 30)])
    with pytest.raises(BudgetError):
        min_ranking_subgraph(g, [0], HALF, node_budget=10)


def test_min_search_matches_brute_force():
    rng = random.Random(8)
    checked = 0
    while checked < 25:
        g = random_graph(rng, 6, n_min=3)
        u, v = rng.sample(range(g.node_count), 2)
        order = (u, v) if rng.random() < 0.5 else (v, u)
        if not is_valid_ranking(pagerank_of(g, HALF, [u, v], "rational"), order, HALF):
            with pytest.raises(ValueError):
                min_ranking_subgraph(g, [u, v], HALF, order=order)
            continue
        res = min_ranking_subgraph(g, [u, v], HALF, order=order)
        brute = brute_min_kernel(g, [u, v], HALF, order)
        assert res.size == len(brute)
        for r in range(2, g.node_count + 1):
            assert rankgraph_decide(g, [u, v], HALF, r, order=order) == (r >= res.size)
        checked += 1


@st.composite
def graph_and_kernel(draw):
    n = draw(st.integers(2, 7))
    pairs = [(a, b) for a in range(n) for b in range(n)]
    arcs = draw(st.lists(st.sampled_from(pairs), unique=True))
    g = DirectedGraph(n, arcs)
    u, v = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
    kernel = draw(st.sets(st.integers(0, n - 1))) | {u, v}
    return g, kernel, u, v


@settings(max_examples=80, deadline=None)
@given(graph_and_kernel(), st.data())
def test_kernel_score_lower_bound(case, data):
    g, kernel, u, v = case
    h = induced_visit_subgraph(g, kernel)
    extra = data.draw(st.integers(0, 4))
    n = g.node_count + extra
    pool = sorted(h.frontier) + list(range(g.node_count, n))
    cand = [(a, b) for a in pool for b in pool if (a, b) not in set(g.arcs)]
    new = data.draw(st.lists(st.sampled_from(cand), unique=True, max_size=8)) if cand else []
    big = DirectedGraph(n, list(g.arcs) + new)
    assert check_compatible(h, big)
    ks = kernel_scores(h, HALF, [u, v])
    pg = pagerank_of(big, HALF, [u, v], "rational")
    for x in (u, v):
        assert pg[x] * n >= ks[x] * len(h)


@settings(max_examples=80, deadline=None)
@given(graph_and_kernel(), st.sets(st.integers(0, 6)))
def test_union_preserves_verdicts(case, more):
    g, k1, u, v = case
    k2 = {x for x in more if x < g.node_count} or {u}
    h1, h2 = induced_visit_subgraph(g, k1), induced_visit_subgraph(g, k2)
    un = union_visit(h1, h2)
    assert check_compatible(un, g)
    assert un == induced_visit_subgraph(g, k1 | k2)
    for order in ((u, v), (v, u)):
        if verify_ranking_subgraph(h1, *order, HALF).is_ranking_subgraph:
            assert verify_ranking_subgraph(un, *order, HALF).is_ranking_subgraph


@settings(max_examples=60, deadline=None)
@given(graph_and_kernel())
def test_full_kernel_completeness(case):
    g, _, u, v = case
    h = induced_visit_subgraph(g, range(g.node_count))
    sc = exact_pagerank(g, HALF, "rational")
    ok = sc[u] >= sc[v] or not separated(sc[u], sc[v], 0)
    assert verify_ranking_subgraph(h, u, v, HALF).is_ranking_subgraph == ok
    assert verify_ranking_order(h, (u, v), HALF) == ok


@settings(max_examples=40, deadline=None)
@given(graph_and_kernel())
def test_float_verdict_agrees_when_rational_clear(case):
    g, kernel, u, v = case
    h = induced_visit_subgraph(g, kernel)
    exact = verify_ranking_subgraph(h, u, v, HALF)
    approx = verify_ranking_subgraph(h, u, v, HALF, "float")
    if exact.is_ranking_subgraph:
        assert approx.is_ranking_subgraph
