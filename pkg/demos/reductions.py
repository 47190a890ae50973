"""Hardness reductions on their example inputs.

Builds the CLIQUE and DOMINATING SET reductions for the two small source
graphs and finds the smallest ranking subgraph of each by exhaustive search.
"""

import time
from fractions import Fraction

from localrank import DirectedGraph
from localrank.instances import has_clique, has_dominating_set, reduce_clique, reduce_domset
from localrank.rank_subgraph import min_ranking_subgraph

# 3-cycle plus a pendant pair: a loopless undirected source with a triangle
clique_src = DirectedGraph(4, [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0), (2, 3), (3, 2)])
r = reduce_clique(clique_src, 3, Fraction(1, 2), 0)
t0 = time.perf_counter()
res = min_ranking_subgraph(r.graph, r.targets, r.params, order=(r.u, r.v))
print(f"CLIQUE m=3: source answer {has_clique(clique_src, 3)}, reduction has {r.graph.node_count} nodes, "
      f"r* = {res.size} (threshold {r.r}), {time.perf_counter() - t0:.2f}s")

# path of three with self-loops on the ends: {1} dominates
ds_src = DirectedGraph(3, [(0, 0), (0, 1), (1, 0), (1, 2), (2, 1), (2, 2)])
r = reduce_domset(ds_src, 1, Fraction(1, 2))
res = min_ranking_subgraph(r.graph, r.targets, r.params, order=(r.u, r.v))
print(f"DOMSET m=1: source answer {has_dominating_set(ds_src, 1)}, reduction has {r.graph.node_count} nodes, "
      f"r* = {res.size} (threshold {r.r}), kernel {sorted(res.kernel)}")
