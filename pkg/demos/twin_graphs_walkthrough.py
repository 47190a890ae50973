"""Why a small neighbourhood cannot always certify a ranking.

Two graphs share the same kernel {0, 1, 3} around targets 0 and 3 but
disagree on which target scores higher.  The verifier rejects the shared
visit subgraph in both directions, and the adversarial witness builds a
compatible graph that reverses each proposed order.
"""

from fractions import Fraction

from localrank import DirectedGraph, RankingParams, exact_pagerank
from localrank.rank_subgraph import (
    adversarial_witness,
    induced_visit_subgraph,
    kernel_scores,
    verify_ranking_subgraph,
)

core = [(1, 0), (2, 0), (3, 3), (4, 3)]
g1 = DirectedGraph(8, core + [(5, 2), (6, 2), (7, 2)])
g2 = DirectedGraph(7, core + [(5, 4), (6, 4), (2, 4)])
params = RankingParams(Fraction(3, 10))

for name, g in (("G1", g1), ("G2", g2)):
    sc = exact_pagerank(g, params, "rational")
    print(f"{name}: P(0) = {sc[0]}, P(3) = {sc[3]}")

h = induced_visit_subgraph(g1, {0, 1, 3})
print("kernel scores on H:", {v: str(x) for v, x in kernel_scores(h, params, [0, 3]).score.items()})

for u, v in ((0, 3), (3, 0)):
    verdict = verify_ranking_subgraph(h, u, v, params)
    print(f"{u} > {v}: ranking subgraph = {verdict.is_ranking_subgraph}, fails {verdict.failing_condition}")
    w = adversarial_witness(h, verdict, params)
    sc = exact_pagerank(w.graph, params, "rational")
    print(f"  witness on {w.graph.node_count} nodes: P({u}) = {float(sc[w.index[u]]):.5f}, "
          f"P({v}) = {float(sc[w.index[v]]):.5f}")
