"""Query-metered access to a hidden graph.

An algorithm interacts with the graph only through a session.  Each
successful query costs one unit; a query naming a node the algorithm has
not seen yet, or a query type outside the session's model, is rejected
without charge.  Node ids are scrambled per session so nothing can be
learned from the generator's numbering.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Iterable

from .graph import DirectedGraph


class Query(enum.Flag):
    LINKS = enum.auto()
    CRAWL = enum.auto()
    JUMP = enum.auto()


ALL_QUERIES = Query.LINKS | Query.CRAWL | Query.JUMP


class QueryError(Exception):
    pass


class DiscoveryError(QueryError):
    """The queried id has not been discovered yet."""


class ModelError(QueryError):
    """The query type is not available in the session's model."""


@dataclass(frozen=True)
class QueryResult:
    nodes: tuple = ()
    arcs: tuple = ()
    parents: tuple = ()
    children: tuple = ()


def parse_model(model) -> Query:
    if isinstance(model, Query):
        return model
    if isinstance(model, str):
        model = [m for m in model.replace("+", ",").split(",") if m.strip()]
    flag = Query(0)
    for item in model:
        flag |= item if isinstance(item, Query) else Query[item.strip().upper()]
    return flag


class ExplorationSession:
    """One exploration of ``graph`` starting from ``targets``.

    ``targets`` and every id exchanged with the caller are external ids.
    The same ``seed`` reproduces the same permutation and the same random
    answers to crawl and jump queries.
    """

    def __init__(self, graph: DirectedGraph, targets: Iterable[int], model=ALL_QUERIES, seed: int = 0):
        model = parse_model(model)
        if not model:
            raise ModelError("exploration model must allow at least one query")
        targets = [graph.check_node(t) for t in targets]
        n = graph.node_count
        perm = list(range(n))
        random.Random(f"localrank-ids-{seed}").shuffle(perm)
        self.graph = graph
        self.model = model
        self.seed = seed
        self._to_ext = perm
        self._to_int = [0] * n
        for i, e in enumerate(perm):
            self._to_int[e] = i
        self._rng = random.Random(f"localrank-queries-{seed}")
        self.targets = tuple(perm[t] for t in targets)
        self.discovered = set(self.targets)
        self.query_count = 0
        self.linked: dict[int, QueryResult] = {}

    def cost(self) -> int:
        return self.query_count

    # Ground-truth helpers for experiment harnesses; algorithms must not call them.
    def external_id(self, internal: int) -> int:
        return self._to_ext[internal]

    def internal_id(self, external: int) -> int:
        return self._to_int[external]

    def _admit(self, kind: Query, u=None) -> int | None:
        if not kind & self.model:
            raise ModelError(f"{kind.name.lower()}() is not available in this model")
        if u is None:
            return None
        if u not in self.discovered:
            raise DiscoveryError(f"node {u!r} has not been discovered")
        return self._to_int[u]

    def links(self, u: int) -> QueryResult:
        iu = self._admit(Query.LINKS, u)
        ext = self._to_ext
        parents = tuple(ext[p] for p in self.graph.in_adjacency[iu])
        children = tuple(ext[c] for c in self.graph.out_adjacency[iu])
        arcs = tuple((p, u) for p in parents) + tuple((u, c) for c in children if c != u)
        nodes = tuple(dict.fromkeys((u,) + parents + children))
        self.discovered.update(nodes)
        self.query_count += 1
        res = QueryResult(nodes, arcs, parents, children)
        self.linked[u] = res
        return res

    def crawl(self, u: int) -> QueryResult:
        iu = self._admit(Query.CRAWL, u)
        kids = self.graph.out_adjacency[iu]
        self.query_count += 1
        if not kids:
            return QueryResult()
        c = self._to_ext[kids[self._rng.randrange(len(kids))]]
        self.discovered.add(c)
        return QueryResult((u, c) if c != u else (u,), ((u, c),), (), (c,))

    def jump(self) -> QueryResult:
        self._admit(Query.JUMP)
        v = self._to_ext[self._rng.randrange(self.graph.node_count)]
        self.discovered.add(v)
        self.query_count += 1
        return QueryResult((v,))

    def crawl_id(self, u: int):
        """``crawl`` returning just the child id, or None."""
        iu = self._admit(Query.CRAWL, u)
        kids = self.graph.out_adjacency[iu]
        self.query_count += 1
        if not kids:
            return None
        c = self._to_ext[kids[self._rng.randrange(len(kids))]]
        self.discovered.add(c)
        return c

    def jump_id(self) -> int:
        """``jump`` returning just the node id."""
        self._admit(Query.JUMP)
        v = self._to_ext[self._rng.randrange(self.graph.node_count)]
        self.discovered.add(v)
        self.query_count += 1
        return v

    def visit_subgraph(self):
        """The visit subgraph formed by all nodes queried with ``links``."""
        from .rank_subgraph import VisitSubgraph

        kernel = set(self.linked)
        arcs = set()
        frontier = set()
        for res in self.linked.values():
            arcs.update(res.arcs)
            frontier.update(res.nodes)
        return VisitSubgraph(kernel, frontier - kernel, arcs)


def open_session(g: DirectedGraph, targets, model=ALL_QUERIES, seed: int = 0) -> ExplorationSession:
    return ExplorationSession(g, targets, model, seed)


def q_links(s: ExplorationSession, u: int) -> QueryResult:
    return s.links(u)


def q_crawl(s: ExplorationSession, u: int) -> QueryResult:
    return s.crawl(u)


def q_jump(s: ExplorationSession) -> QueryResult:
    return s.jump()


def cost(s: ExplorationSession) -> int:
    return s.cost()
