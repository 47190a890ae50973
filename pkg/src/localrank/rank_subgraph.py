"""Visit subgraphs, kernel scores and ranking subgraphs.

A visit subgraph is what an exploration has seen: the kernel nodes whose
neighborhoods were fully revealed, and the frontier nodes that merely
appeared as neighbors.  A visit subgraph is a ranking subgraph for
``u > v`` when every graph that could have produced it ranks ``u`` above
``v`` (or ties them).  Two comparisons on kernel scores decide this, and
both are implemented here in exact arithmetic.
"""

from __future__ import annotations

import itertools
from collections import namedtuple
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ._linalg import series_fixed_point, solve_fixed_point
from .graph import (
    RATIONAL_BLOCK_CAP,
    DirectedGraph,
    InvalidNodeError,
    RankingParams,
    epsilon_ranking,
    is_valid_ranking,
    pagerank_of,
    separated,
)

FLOAT_SLACK = 1e-9
WITNESS_CAP = 2 ** 20


class StructuralError(ValueError):
    """The node/arc data does not form a visit subgraph."""


class WitnessCapExceeded(RuntimeError):
    pass


class BudgetError(ValueError):
    pass


class VisitSubgraph:
    """Kernel/frontier partitioned graph over arbitrary integer ids."""

    __slots__ = ("kernel", "frontier", "arcs", "_out", "_in")

    def __init__(self, kernel: Iterable[int], frontier: Iterable[int], arcs: Iterable[tuple[int, int]]):
        kernel = frozenset(kernel)
        frontier = frozenset(frontier)
        arcs = frozenset((int(s), int(t)) for s, t in arcs)
        if kernel & frontier:
            raise StructuralError(f"nodes {sorted(kernel & frontier)} are both kernel and frontier")
        nodes = kernel | frontier
        out = {x: [] for x in nodes}
        inn = {x: [] for x in nodes}
        for s, t in arcs:
            if s not in nodes or t not in nodes:
                raise StructuralError(f"arc ({s}, {t}) leaves the node set")
            if s in frontier and t in frontier:
                raise StructuralError(f"arc ({s}, {t}) joins two frontier nodes")
            out[s].append(t)
            inn[t].append(s)
        for w in frontier:
            if not out[w] and not inn[w]:
                raise StructuralError(f"frontier node {w} touches no kernel node")
        self.kernel = kernel
        self.frontier = frontier
        self.arcs = arcs
        self._out = {x: tuple(sorted(v)) for x, v in out.items()}
        self._in = {x: tuple(sorted(v)) for x, v in inn.items()}

    @property
    def nodes(self) -> frozenset:
        return self.kernel | self.frontier

    def __len__(self):
        return len(self.kernel) + len(self.frontier)

    def children(self, x):
        return self._out[x]

    def parents(self, x):
        return self._in[x]

    def out_degree(self, x) -> int:
        return len(self._out[x])

    def __eq__(self, other):
        if not isinstance(other, VisitSubgraph):
            return NotImplemented
        return (self.kernel, self.frontier, self.arcs) == (other.kernel, other.frontier, other.arcs)

    def __hash__(self):
        return hash((self.kernel, self.frontier, self.arcs))

    def __repr__(self):
        return f"VisitSubgraph(kernel={sorted(self.kernel)}, frontier={sorted(self.frontier)}, arcs={len(self.arcs)})"


def induced_visit_subgraph(g: DirectedGraph, kernel: Iterable[int]) -> VisitSubgraph:
    """The visit subgraph obtained by querying ``links`` on every kernel node."""
    kernel = frozenset(g.check_node(x) for x in kernel)
    if not kernel:
        raise StructuralError("kernel must be nonempty")
    arcs = set()
    for x in kernel:
        arcs.update((x, y) for y in g.out_adjacency[x])
        arcs.update((y, x) for y in g.in_adjacency[x])
    frontier = {y for a in arcs for y in a} - kernel
    return VisitSubgraph(kernel, frontier, arcs)


def check_compatible(h: VisitSubgraph, g: DirectedGraph) -> bool:
    """Could exploring the kernel of ``h`` in ``g`` have produced exactly ``h``?"""
    for x in h.nodes:
        if not 0 <= x < g.node_count:
            raise InvalidNodeError(f"visit subgraph node {x} is not a node of the graph")
    if not h.kernel:
        return not h.frontier and not h.arcs
    return induced_visit_subgraph(g, h.kernel) == h


def union_visit(h1: VisitSubgraph, h2: VisitSubgraph) -> VisitSubgraph:
    kernel = h1.kernel | h2.kernel
    return VisitSubgraph(kernel, (h1.nodes | h2.nodes) - kernel, h1.arcs | h2.arcs)


@dataclass(frozen=True)
class KernelScores:
    score: dict
    contrib: dict
    mode: str

    def __getitem__(self, v):
        return self.score[v]


def kernel_scores(h: VisitSubgraph, params: RankingParams, targets: Sequence[int], mode: str = "rational", tol: float = 1e-12) -> KernelScores:
    """Kernel scores ``P_H(v)`` and kernel contributions ``P_H(z, v)``.

    Only walks that stay inside the kernel count.  A kernel node's mass is
    split over all of its arcs in ``h``, so arcs into the frontier leak.
    ``contrib[v][z]`` is given for every kernel node ``z``.
    """
    targets = list(targets)
    for v in targets:
        if v not in h.kernel:
            raise InvalidNodeError(f"target {v} is not a kernel node")
    kern = sorted(h.kernel)
    pos = {x: i for i, x in enumerate(kern)}
    exact = mode == "rational"
    coeffs = []
    for z in kern:
        kids = h.children(z)
        if kids:
            w = Fraction(1, len(kids)) if exact else 1.0 / len(kids)
            coeffs.append({pos[y]: w for y in kids if y in pos})
        else:
            coeffs.append({})
    size = len(h)
    if mode == "rational":
        alpha = params.alpha
        base = (1 - alpha) / size
        zero = Fraction(0)
    elif mode in ("float", "float-direct"):
        alpha = float(params.alpha)
        base = (1 - alpha) / size
        zero = 0.0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rhs = []
    for v in targets:
        r = [zero] * len(kern)
        r[pos[v]] = base
        rhs.append(r)
    if mode == "float":
        sols = series_fixed_point(coeffs, rhs, alpha, tol, "inf")
    else:
        sols = solve_fixed_point(coeffs, rhs, alpha, RATIONAL_BLOCK_CAP if exact else None)
    contrib = {}
    score = {}
    for v, x in zip(targets, sols):
        contrib[v] = {z: x[pos[z]] for z in kern}
        score[v] = sum(x, zero)
    return KernelScores(score, contrib, "float" if mode != "rational" else "rational")


@dataclass(frozen=True)
class RankGraphVerdict:
    is_ranking_subgraph: bool
    failing_condition: str | None
    witness: int | None
    order: tuple

    @property
    def u(self):
        return self.order[0]

    @property
    def v(self):
        return self.order[1]


def verify_ranking_subgraph(h: VisitSubgraph, u: int, v: int, params: RankingParams, mode: str = "rational", scores: KernelScores | None = None) -> RankGraphVerdict:
    """Is ``h`` a ranking subgraph for ``u`` ranked above ``v``?

    COND1 compares the kernel scores up to the ``1+epsilon`` slack; COND2
    requires every frontier node to send at least as much kernel
    contribution to ``u`` as to ``v`` through its kernel children.
    """
    if scores is None:
        scores = kernel_scores(h, params, [u, v], mode)
    slack = 0 if mode == "rational" else FLOAT_SLACK
    eps = params.epsilon if mode == "rational" else float(params.epsilon)
    cu, cv = scores.contrib[u], scores.contrib[v]
    if (1 + eps) * scores.score[u] < scores.score[v] - slack:
        return RankGraphVerdict(False, "COND1", None, (u, v))
    for w in sorted(h.frontier):
        kids = [z for z in h.children(w) if z in h.kernel]
        if not kids:
            continue
        if sum(cu[z] for z in kids) < sum(cv[z] for z in kids) - slack:
            return RankGraphVerdict(False, "COND2", w, (u, v))
    return RankGraphVerdict(True, None, None, (u, v))


def verify_ranking_order(h: VisitSubgraph, order: Sequence[int], params: RankingParams, mode: str = "rational") -> bool:
    """Pairwise check that ``h`` is a ranking subgraph for the given order."""
    order = list(order)
    if len(order) < 2:
        return True
    scores = kernel_scores(h, params, order, mode)
    for i, a in enumerate(order):
        for b in order[i + 1:]:
            if not verify_ranking_subgraph(h, a, b, params, mode, scores).is_ranking_subgraph:
                return False
    return True


Witness = namedtuple("Witness", "graph index added")


def adversarial_witness(h: VisitSubgraph, verdict: RankGraphVerdict, params: RankingParams, cap: int = WITNESS_CAP) -> Witness:
    """A graph compatible with ``h`` in which ``v`` is separated above ``u``.

    ``index`` maps the ids of ``h`` to the nodes of the returned graph.
    The number of added nodes doubles from ``|h|`` until exact scores
    certify the flip.
    """
    if verdict.is_ranking_subgraph or verdict.failing_condition is None:
        raise ValueError("verdict has no failing condition to exploit")
    u, v = verdict.order
    nodes = sorted(h.nodes)
    index = {x: i for i, x in enumerate(nodes)}
    base_arcs = [(index[s], index[t]) for s, t in sorted(h.arcs)]
    size = len(nodes)
    frontier = [index[w] for w in sorted(h.frontier)]
    iu, iv = index[u], index[v]
    if verdict.failing_condition == "COND2":
        iw = index[verdict.witness]
        others = [w for w in frontier if w != iw]
    n_add = max(size, 1)
    while n_add <= cap:
        extra = []
        if verdict.failing_condition == "COND1":
            added = n_add
            for w in frontier:
                extra.extend((w, size + i) for i in range(n_add))
        else:
            extra.extend((size + i, iw) for i in range(n_add))
            added = n_add
            if others:
                extra.extend((w, size + n_add + i) for w in others for i in range(n_add))
                added = 2 * n_add
        g = DirectedGraph(size + added, base_arcs + extra)
        sc = pagerank_of(g, params, [iu, iv], "rational")
        if sc[iv] > sc[iu] and separated(sc[iu], sc[iv], params.epsilon):
            return Witness(g, index, added)
        n_add *= 2
    raise WitnessCapExceeded(
        f"no flip certified with up to {cap} added nodes; the failing condition is likely tight"
    )


@dataclass(frozen=True)
class MinRankResult:
    kernel: frozenset
    size: int
    order: tuple
    checked: int = field(default=0, compare=False)


NOT_FOUND = None


def _candidate_pool(g, targets):
    return sorted(g.ancestors(targets) - set(targets))


def _reaches_targets(g, kernel, targets):
    seen = set(targets)
    stack = list(targets)
    while stack:
        x = stack.pop()
        for p in g.in_adjacency[x]:
            if p in kernel and p not in seen:
                seen.add(p)
                stack.append(p)
    return len(seen) == len(kernel)


def _passes(g, kernel, order, params):
    h = induced_visit_subgraph(g, kernel)
    if _float_margin(h, order, params) < -FLOAT_SLACK:
        return False
    return verify_ranking_order(h, order, params, "rational")


def _float_margin(h, order, params):
    """Smallest slack over both conditions for every ordered pair, in floats."""
    scores = kernel_scores(h, params, order, "float-direct")
    eps = float(params.epsilon)
    feeds = [[z for z in h.children(w) if z in h.kernel] for w in h.frontier]
    best = float("inf")
    for i, a in enumerate(order):
        ca = scores.contrib[a]
        for b in order[i + 1:]:
            cb = scores.contrib[b]
            best = min(best, (1 + eps) * scores.score[a] - scores.score[b])
            for kids in feeds:
                if kids:
                    best = min(best, sum(ca[z] for z in kids) - sum(cb[z] for z in kids))
    return best


def true_order(g: DirectedGraph, targets: Sequence[int], params: RankingParams) -> tuple:
    scores = pagerank_of(g, params, targets, "rational")
    return epsilon_ranking(scores, list(targets), params).order


def _setup(g, targets, params, node_budget, order):
    targets = [g.check_node(t) for t in targets]
    if len(set(targets)) != len(targets) or not targets:
        raise ValueError("targets must be distinct and nonempty")
    pool = _candidate_pool(g, targets)
    if len(pool) + len(targets) > node_budget:
        raise BudgetError(
            f"{len(pool) + len(targets)} candidate kernel nodes exceed node_budget={node_budget}"
        )
    scores = pagerank_of(g, params, targets, "rational")
    if order is None:
        order = epsilon_ranking(scores, targets, params).order
    elif sorted(order) != sorted(targets):
        raise ValueError("order must be a permutation of targets")
    elif not is_valid_ranking(scores, order, params):
        raise ValueError(f"order {tuple(order)} contradicts the exact scores; no kernel can certify it")
    return targets, pool, tuple(order)


def _search_size(g, targets, pool, order, params, size):
    """First kernel of exactly ``size`` nodes in lexicographic order, if any."""
    checked = 0
    tset = frozenset(targets)
    for extra in itertools.combinations(pool, size - len(targets)):
        kernel = tset | frozenset(extra)
        if not _reaches_targets(g, kernel, targets):
            continue
        checked += 1
        if _passes(g, kernel, order, params):
            return kernel, checked
    return None, checked


def min_ranking_subgraph(g: DirectedGraph, targets: Sequence[int], params: RankingParams, node_budget: int = 22, order: Sequence[int] | None = None):
    """Smallest kernel whose induced visit subgraph is a ranking subgraph.

    Only ancestors of the targets can matter, so the budget bounds that
    candidate set.  Kernels are tried by increasing size, then in
    lexicographic order.  Returns a ``MinRankResult``; ``order`` overrides
    the true ranking that must be certified.
    """
    targets, pool, order = _setup(g, targets, params, node_budget, order)
    total = 0
    for size in range(len(targets), len(targets) + len(pool) + 1):
        kernel, checked = _search_size(g, targets, pool, order, params, size)
        total += checked
        if kernel is not None:
            return MinRankResult(kernel, size, order, total)
    raise AssertionError("the full ancestor set must always be a ranking kernel")


def rankgraph_decide(g: DirectedGraph, targets: Sequence[int], params: RankingParams, r: int, node_budget: int = 22, order: Sequence[int] | None = None) -> bool:
    """Does a ranking subgraph with kernel size at most ``r`` exist?

    Supersets of a ranking kernel are ranking kernels, so it is enough to
    look at kernels of size exactly ``r`` inside the candidate set.
    """
    targets, pool, order = _setup(g, targets, params, node_budget, order)
    if r < len(targets):
        return False
    size = min(r, len(targets) + len(pool))
    kernel, _ = _search_size(g, targets, pool, order, params, size)
    return kernel is not None
