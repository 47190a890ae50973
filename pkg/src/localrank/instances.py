"""Generators for the adversarial graph families and the hardness reductions.

Every generator returns the graph together with its targets and the
counts it was built from, and can re-derive those counts from the bare
topology (``audit``), so a bundle can be checked after relabeling.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import (
    DirectedGraph,
    RankingParams,
    as_fraction,
    exact_pagerank,
    pagerank_of,
    separated,
)


class InfeasibleParameters(ValueError):
    pass


def round_half_up(x) -> int:
    return math.floor(as_fraction(x) + Fraction(1, 2))


def round_positive(x) -> int:
    """Nearest positive integer, halves rounded up."""
    return max(1, round_half_up(x))


@dataclass
class InstanceBundle:
    graph: DirectedGraph
    targets: list
    declared: dict

    @property
    def family(self) -> str:
        return self.declared["family"]

    @property
    def params(self) -> RankingParams:
        return RankingParams(self.declared["alpha"], self.declared.get("epsilon", 0))

    def relabel(self, perm) -> "InstanceBundle":
        return InstanceBundle(self.graph.relabel(perm), [perm[t] for t in self.targets], dict(self.declared))

    def audit(self) -> dict:
        """Structural checks recomputed from the topology; values are booleans."""
        return _AUDITS[self.family](self)

    def scores(self, mode: str = "rational") -> dict:
        return pagerank_of(self.graph, RankingParams(self.declared["alpha"]), self.targets, mode)


def _sole_child_orphans(g, x, exclude=()):
    return [p for p in g.in_adjacency[x] if p != x and p not in exclude and not g.in_adjacency[p] and g.out_adjacency[p] == (x,)]


# -- deterministic lower bound -------------------------------------------------


def det_lb_counts(k, p_value, eps_value, m):
    p, eps = as_fraction(p_value), as_fraction(eps_value)
    counts = [round_positive(m * p * (1 + eps) ** i) for i in range(k)]
    if counts[-1] == counts[-2]:
        counts[-1] += 1
    return counts


def gen_det_lb(k: int, alpha, p_value, eps_value, m: int) -> InstanceBundle:
    """``k`` disjoint blocks, each a self-looped target fed by bulk parents.

    Blocks ``i < k`` also carry an ``m``-clique with one arc into the
    target, and when two consecutive bulk counts coincide a fractional
    parent resolves the tie through its arc count ``q_i``.
    """
    if k < 2:
        raise InfeasibleParameters("k must be at least 2")
    if m < 3:
        raise InfeasibleParameters("clique size m must be at least 3")
    alpha = as_fraction(alpha)
    eps = as_fraction(eps_value)
    if not 0 < as_fraction(p_value) < 1 or eps < 0 or not 0 < alpha < 1:
        raise InfeasibleParameters("need 0 < p < 1, eps >= 0, 0 < alpha < 1")
    counts = det_lb_counts(k, p_value, eps, m)
    if counts[-1] > m:
        raise InfeasibleParameters(f"n_k = {counts[-1]} exceeds m = {m}")
    frac = [0 < i < k - 1 and counts[i] == counts[i - 1] for i in range(k)]
    n = sum(1 + counts[i] + (m if i < k - 1 else 0) + (1 if frac[i] else 0) for i in range(k))
    arcs = []
    targets = []
    cliques = []
    nxt = 0
    q_values = [None] * k
    params = RankingParams(alpha)
    prev_score = None
    for i in range(k):
        v = nxt
        nxt += 1
        targets.append(v)
        block = [(v, v)]
        bulk = list(range(nxt, nxt + counts[i]))
        nxt += counts[i]
        block += [(b, v) for b in bulk]
        clique = []
        if i < k - 1:
            clique = list(range(nxt, nxt + m))
            nxt += m
            block += [(a, b) for a in clique for b in clique if a != b]
            block.append((clique[0], v))
        cliques.append(clique)
        if frac[i]:
            f = nxt
            nxt += 1
            q = _search_q(n, block, v, f, clique, params, eps, prev_score)
            q_values[i] = q
            block += [(f, v)] + [(f, c) for c in clique[1:q + 1]]
        arcs += block
        prev_score = pagerank_of(DirectedGraph(n, arcs), params, [v], "float")[v]
    assert nxt == n
    g = DirectedGraph(n, arcs)
    declared = dict(
        family="det_lb", k=k, alpha=alpha, p_value=as_fraction(p_value), epsilon=eps, m=m,
        n_i=counts, q_i=q_values, clique_size=m, fractional=[bool(x) for x in frac],
    )
    return InstanceBundle(g, targets, declared)


def _search_q(n, block, v, f, clique, params, eps, prev_score):
    lo, hi = 1 + eps / 2, 1 + 2 * eps
    best = None
    for q in range(2, len(clique)):
        g = DirectedGraph(n, block + [(f, v)] + [(f, c) for c in clique[1:q + 1]])
        ratio = pagerank_of(g, params, [v], "float")[v] / prev_score
        if float(lo) <= ratio <= float(hi):
            gap = abs(math.log(ratio) - math.log(1 + float(eps)))
            if best is None or gap < best[0]:
                best = (gap, q)
    if best is None:
        raise InfeasibleParameters("no fractional-parent arc count lands the separation in range")
    q = best[1]
    exact = DirectedGraph(n, block + [(f, v)] + [(f, c) for c in clique[1:q + 1]])
    ratio = pagerank_of(exact, params, [v], "rational")[v] / as_fraction(prev_score)
    if not lo - Fraction(1, 10 ** 6) <= ratio <= hi + Fraction(1, 10 ** 6):
        raise InfeasibleParameters("fractional-parent separation not confirmed exactly")
    return q


def _audit_det_lb(b: InstanceBundle) -> dict:
    g, d = b.graph, b.declared
    out = {}
    for i, v in enumerate(b.targets):
        parents = [p for p in g.in_adjacency[v] if p != v]
        bulk = _sole_child_orphans(g, v)
        out[f"v{i + 1}_self_loop"] = g.has_arc(v, v)
        out[f"v{i + 1}_bulk"] = len(bulk) == d["n_i"][i]
        others = [p for p in parents if p not in bulk]
        cl = [p for p in others if g.in_degree(p) == d["m"] - 1]
        fr = [p for p in others if g.in_degree(p) == 0]
        want_clique = i < d["k"] - 1
        out[f"v{i + 1}_clique_arc"] = len(cl) == (1 if want_clique else 0)
        if want_clique and cl:
            members = set(g.in_adjacency[cl[0]]) | {cl[0]}
            complete = all(g.has_arc(a, c) for a in members for c in members if a != c)
            out[f"v{i + 1}_clique"] = complete and len(members) == d["m"]
        q = d["q_i"][i]
        if q is None:
            out[f"v{i + 1}_fractional"] = not fr
        else:
            out[f"v{i + 1}_fractional"] = len(fr) == 1 and g.out_degree(fr[0]) == q + 1
    return out


def det_lb_self_check(b: InstanceBundle) -> dict:
    """Exact-score checks: targets are the top ``k`` and adjacent ratios."""
    params = RankingParams(b.declared["alpha"])
    scores = exact_pagerank(b.graph, params, "rational")
    k = len(b.targets)
    tset = set(b.targets)
    worst_target = min(scores[t] for t in b.targets)
    best_other = max((scores[x] for x in range(b.graph.node_count) if x not in tset), default=0)
    eps = b.declared["epsilon"]
    ratios = [scores[b.targets[i + 1]] / scores[b.targets[i]] for i in range(k - 1)]
    return dict(
        top_k=worst_target > best_other,
        ratios=ratios,
        ratios_in_window=all(1 + eps / 2 <= r <= 1 + 2 * eps for r in ratios),
        scores=[scores[t] for t in b.targets],
    )


# -- Monte Carlo lower bound, local queries only -------------------------------


def gen_mc_local_lb(k: int, alpha, p_value, eps_value, m: int) -> InstanceBundle:
    """Per block: a chain ending at the target, ``m`` parents on its head,
    one of them (the strong ancestor) with extra orphan parents."""
    if k < 2 or m < 1:
        raise InfeasibleParameters("need k >= 2 and m >= 1")
    alpha = as_fraction(alpha)
    eps = as_fraction(eps_value)
    p = as_fraction(p_value)
    if not 0 < p < 1 or eps < 0 or not 0 < alpha < 1:
        raise InfeasibleParameters("need 0 < p < 1, eps >= 0, 0 < alpha < 1")
    chain = max(1, round_half_up(math.log(float(p)) / math.log(float(alpha))))
    strong = [round_half_up(((1 + eps) ** i - 1) * m / alpha) for i in range(k)]
    arcs = []
    targets = []
    nxt = 0
    for i in range(k):
        nodes = list(range(nxt, nxt + chain))
        nxt += chain
        v = nodes[-1]
        targets.append(v)
        arcs.append((v, v))
        arcs += list(zip(nodes, nodes[1:]))
        head = nodes[0]
        parents = list(range(nxt, nxt + m))
        nxt += m
        arcs += [(x, head) for x in parents]
        extra = list(range(nxt, nxt + strong[i]))
        nxt += strong[i]
        arcs += [(x, parents[0]) for x in extra]
    g = DirectedGraph(nxt, arcs)
    declared = dict(
        family="mc_local_lb", k=k, alpha=alpha, p_value=p, epsilon=eps, m=m,
        chain_length=chain, strong_parents=strong,
    )
    return InstanceBundle(g, targets, declared)


def mc_local_closed_form(b: InstanceBundle) -> list:
    d = b.declared
    a, L, m, n = d["alpha"], d["chain_length"], d["m"], b.graph.node_count
    return [(sum(a ** j for j in range(L)) + a ** L * (m + a * s)) / n for s in d["strong_parents"]]


def _walk_chain(g, v, steps):
    """Follow ``steps`` single-parent links back from ``v``; None if broken."""
    x = v
    for _ in range(steps):
        ps = [p for p in g.in_adjacency[x] if p != x]
        if len(ps) != 1 or g.out_adjacency[ps[0]] != (x,):
            return None
        x = ps[0]
    return x


def _strong_counts_ok(g, parents, s):
    counts = sorted(len(_sole_child_orphans(g, h)) for h in parents)
    total = sorted(g.in_degree(h) for h in parents)
    return counts == total and counts[:-1] == [0] * (len(counts) - 1) and counts[-1] == s


def _audit_mc_local(b: InstanceBundle) -> dict:
    g, d = b.graph, b.declared
    out = {}
    for i, v in enumerate(b.targets):
        out[f"v{i + 1}_self_loop"] = g.has_arc(v, v)
        head = _walk_chain(g, v, d["chain_length"] - 1)
        out[f"v{i + 1}_chain"] = head is not None
        if head is None:
            continue
        heads = [p for p in g.in_adjacency[head] if p != head]
        out[f"v{i + 1}_head_parents"] = len(heads) == d["m"] and all(g.out_adjacency[h] == (head,) for h in heads)
        out[f"v{i + 1}_strong"] = bool(heads) and _strong_counts_ok(g, heads, d["strong_parents"][i])
    return out


# -- Monte Carlo lower bound, every model --------------------------------------


def gen_mc_global_lb(k: int, alpha, p_value, eps_value, m: int) -> InstanceBundle:
    """Per block: ``m sqrt(p)/alpha`` parents of the target (or of a damping
    chain when ``p < m^(-2/3)``), all but one leaking into private sinks; the
    remaining strong ancestor carries the hidden orphan parents."""
    if k < 2 or m < 1:
        raise InfeasibleParameters("need k >= 2 and m >= 1")
    alpha = as_fraction(alpha)
    eps = as_fraction(eps_value)
    p = as_fraction(p_value)
    if not 0 < p < 1 or eps < 0 or not 0 < alpha < 1:
        raise InfeasibleParameters("need 0 < p < 1, eps >= 0, 0 < alpha < 1")
    floor_p = float(m) ** (-2.0 / 3.0)
    chain = 0
    p_eff = float(p)
    if float(p) < floor_p:
        chain = round_half_up(math.log(float(p) / floor_p) / math.log(float(alpha)))
        p_eff = floor_p
    n_parents = round_positive(m * math.sqrt(p_eff) / float(alpha))
    outdeg = round_positive(1 / math.sqrt(p_eff))
    strong = [round_half_up(m * p_eff * float((1 + eps) ** i - 1) / float(alpha) ** 2) for i in range(k)]
    arcs = []
    targets = []
    nxt = 0
    for i in range(k):
        v = nxt
        nxt += 1
        targets.append(v)
        arcs.append((v, v))
        links = list(range(nxt, nxt + chain))
        nxt += chain
        path = links + [v]
        arcs += list(zip(path, path[1:]))
        entry = path[0]
        strong_node = nxt
        nxt += 1
        arcs.append((strong_node, entry))
        extra = list(range(nxt, nxt + strong[i]))
        nxt += strong[i]
        arcs += [(x, strong_node) for x in extra]
        for _ in range(n_parents - 1):
            par = nxt
            nxt += 1
            arcs.append((par, entry))
            sinks = list(range(nxt, nxt + outdeg - 1))
            nxt += outdeg - 1
            arcs += [(par, s) for s in sinks]
    g = DirectedGraph(nxt, arcs)
    declared = dict(
        family="mc_global_lb", k=k, alpha=alpha, p_value=p, epsilon=eps, m=m,
        parents=n_parents, parent_outdegree=outdeg, strong_parents=strong,
        chain_length=chain, p_effective=p_eff,
    )
    return InstanceBundle(g, targets, declared)


def mc_global_closed_form(b: InstanceBundle) -> list:
    d = b.declared
    a, A, dd, L, n = d["alpha"], d["parents"], d["parent_outdegree"], d["chain_length"], b.graph.node_count
    out = []
    for s in d["strong_parents"]:
        feed = a * (A - 1) * Fraction(1, dd) + a + a * a * s
        out.append((1 + sum(a ** j for j in range(1, L + 1)) + a ** L * feed) / n)
    return out


def _audit_mc_global(b: InstanceBundle) -> dict:
    g, d = b.graph, b.declared
    out = {}
    for i, v in enumerate(b.targets):
        out[f"v{i + 1}_self_loop"] = g.has_arc(v, v)
        entry = _walk_chain(g, v, d["chain_length"])
        out[f"v{i + 1}_chain"] = entry is not None
        if entry is None:
            continue
        ps = [p for p in g.in_adjacency[entry] if p != entry]
        out[f"v{i + 1}_parents"] = len(ps) == d["parents"]
        s = d["strong_parents"][i]
        if d["parent_outdegree"] == 1:
            out[f"v{i + 1}_ordinary"] = all(g.out_adjacency[p] == (entry,) for p in ps)
            out[f"v{i + 1}_strong"] = bool(ps) and _strong_counts_ok(g, ps, s)
            continue
        strong = [p for p in ps if g.out_adjacency[p] == (entry,)]
        ordinary = [p for p in ps if p not in strong]
        out[f"v{i + 1}_ordinary"] = all(
            g.out_degree(p) == d["parent_outdegree"]
            and not g.in_adjacency[p]
            and all(x == entry or (g.in_adjacency[x] == (p,) and not g.out_adjacency[x]) for x in g.out_adjacency[p])
            for p in ordinary
        )
        out[f"v{i + 1}_strong"] = (
            len(strong) == 1 and len(_sole_child_orphans(g, strong[0])) == s == g.in_degree(strong[0])
        )
    return out


# -- EludeRS instance ----------------------------------------------------------


def gen_eluders(m: int, alpha) -> InstanceBundle:
    """Self-looped ``u`` with ``m+1`` orphan parents and ``v`` with ``m``."""
    if m < 1:
        raise InfeasibleParameters("m must be at least 1")
    alpha = as_fraction(alpha)
    u, v = 0, 1
    arcs = [(u, u), (v, v)]
    arcs += [(2 + i, u) for i in range(m + 1)]
    arcs += [(m + 3 + i, v) for i in range(m)]
    g = DirectedGraph(2 * m + 3, arcs)
    declared = dict(family="eluders", alpha=alpha, m=m, separation=alpha / (1 + alpha * m), epsilon=0)
    return InstanceBundle(g, [u, v], declared)


def _audit_eluders(b: InstanceBundle) -> dict:
    g, m = b.graph, b.declared["m"]
    u, v = b.targets
    return dict(
        u_self_loop=g.has_arc(u, u),
        v_self_loop=g.has_arc(v, v),
        u_parents=len(_sole_child_orphans(g, u)) == m + 1 == g.in_degree(u) - 1,
        v_parents=len(_sole_child_orphans(g, v)) == m == g.in_degree(v) - 1,
        size=g.node_count == 2 * m + 3,
    )


_AUDITS = dict(det_lb=_audit_det_lb, mc_local_lb=_audit_mc_local, mc_global_lb=_audit_mc_global, eluders=_audit_eluders)


# -- hardness reductions -------------------------------------------------------


@dataclass
class ReductionArtifacts:
    graph: DirectedGraph
    u: int
    v: int
    r: int
    params: RankingParams
    correspondence: dict
    d: int | None = None
    q: int | None = None
    sinks: dict = field(default_factory=dict)

    @property
    def targets(self):
        return [self.u, self.v]


@dataclass(frozen=True)
class NoShortcut:
    """The reduction answers NO to the source problem without a search."""

    answer: bool
    reason: str


def reduce_clique(g0: DirectedGraph, m: int, alpha, eps_value=0):
    """Map a CLIQUE instance ``(g0, m)`` to a two-target ranking instance.

    ``g0`` has an ``m``-clique (arcs both ways between every pair) exactly
    when a ranking subgraph for ``u`` above ``v`` with kernel size ``r``
    exists.  Returns ``NoShortcut`` when the answer is NO by inspection.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    alpha = as_fraction(alpha)
    eps = as_fraction(eps_value)
    params = RankingParams(alpha, eps)
    n0 = g0.node_count
    u = n0
    arcs = [(u, u)]
    out = {x: [y for y in g0.out_adjacency[x] if y != x] for x in range(n0)}
    for x in range(n0):
        arcs += [(x, y) for y in out[x]] + [(x, x), (x, u)]
    d = max((len(out[x]) + 2 for x in range(n0)), default=0)
    if d < m + 1:
        return NoShortcut(False, f"normalized out-degree {d} is below m+1")
    s_sinks = list(range(u + 1, u + 1 + max(d - 2, 0)))
    for x in range(n0):
        arcs += [(x, s) for s in s_sinks[: d - len(out[x]) - 2]]
    arcs += [(s, s) for s in s_sinks]
    nxt = u + 1 + len(s_sinks)
    v = nxt
    nxt += 1
    arcs.append((v, v))
    clique = list(range(nxt, nxt + m))
    nxt += m
    t_sinks = list(range(nxt, nxt + d - m - 1))
    nxt += len(t_sinks)
    for c in clique:
        arcs += [(c, c), (c, v)] + [(c, y) for y in clique if y != c] + [(c, t) for t in t_sinks]
    arcs += [(t, t) for t in t_sinks]
    big_d = math.ceil(Fraction(d * d) / (alpha * (1 + eps)))
    q = _clique_q(clique, v, d, m, big_d, params, arcs, nxt)
    q_parents = list(range(nxt, nxt + q))
    nxt += q
    q_sinks = list(range(nxt, nxt + (big_d - 1 if q else 0)))
    nxt += len(q_sinks)
    for pnode in q_parents:
        arcs += [(pnode, v)] + [(pnode, s) for s in q_sinks]
    arcs += [(s, s) for s in q_sinks]
    g = DirectedGraph(nxt, arcs)
    sc = pagerank_of(g, params, [u, v], "rational")
    if (1 + eps) * sc[u] < sc[v]:
        return NoShortcut(False, "u already scores below v/(1+eps)")
    return ReductionArtifacts(
        g, u, v, 2 * (m + 1) + q, params, {x: x for x in range(n0)}, d=d, q=q,
        sinks=dict(s=s_sinks, t=t_sinks, q=q_sinks, q_parents=q_parents, clique=clique, D=big_d),
    )


def _clique_q(clique, v, d, m, big_d, params, arcs, nxt):
    """Smallest ``q`` putting the extra-parent kernel share in its window.

    Kernel scores are scaled by ``|H|``, which cancels from both sides.
    """
    alpha, eps = params.alpha, params.epsilon
    # kernel score of v from itself and the clique, with mass split over d arcs
    from .rank_subgraph import VisitSubgraph, kernel_scores

    kern = set(clique) | {v}
    harcs = [(a, b) for a, b in arcs if a in kern or b in kern]
    front = {x for a in harcs for x in a} - kern
    h = VisitSubgraph(kern, front, harcs)
    c_c = kernel_scores(h, params, [v], "rational").score[v] * len(h)
    per_parent = alpha / big_d
    lower = eps * c_c - alpha ** 2 * (1 + eps) / (d * d)
    q = 0
    while q * per_parent < lower:
        q += 1
    if q * per_parent > eps * c_c:
        raise AssertionError("extra-parent count window is empty")
    return q


def close_dangling(g0: DirectedGraph) -> DirectedGraph:
    """Give every dangling node a self-loop.

    Such a node can only be dominated by itself, exactly as a dangling node
    must belong to every dominating set, so the answer is unchanged.
    """
    return g0.with_arcs(0, [(x, x) for x in g0.dangling()])


def reduce_domset(g0: DirectedGraph, m: int, alpha) -> ReductionArtifacts:
    """Map a DOMINATING SET instance to a two-target ranking instance.

    A dominating set here is a set ``D`` such that every node outside ``D``
    has an arc into ``D``.  One of size at most ``m`` exists exactly when a
    ranking subgraph for ``u`` above ``v`` with kernel size ``3 + m`` does.
    Each ``u'_i`` also points to its own ``u_i``: a member of ``D`` covers
    itself, so ``u'_i`` must be covered even when ``v_i`` has no arc into ``D``.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if g0.dangling():
        raise ValueError("source graph has dangling nodes; apply close_dangling first")
    n0 = g0.node_count
    us = list(range(n0))
    ups = list(range(n0, 2 * n0))
    u, v, w = 2 * n0, 2 * n0 + 1, 2 * n0 + 2
    arcs = [(u, u), (v, v), (w, v)]
    arcs += [(x, u) for x in us]
    for i in range(n0):
        arcs.append((ups[i], w))
        arcs += [(ups[i], us[j]) for j in sorted(set(g0.out_adjacency[i]) | {i})]
    g = DirectedGraph(2 * n0 + 3, arcs)
    return ReductionArtifacts(
        g, u, v, 3 + m, RankingParams(alpha), {i: us[i] for i in range(n0)},
        sinks=dict(primed=ups, w=w),
    )


def has_clique(g0: DirectedGraph, m: int) -> bool:
    nodes = range(g0.node_count)
    for combo in itertools.combinations(nodes, m):
        if all(g0.has_arc(a, b) and g0.has_arc(b, a) for a, b in itertools.combinations(combo, 2)):
            return True
    return False


def has_dominating_set(g0: DirectedGraph, m: int) -> bool:
    n = g0.node_count
    for size in range(0, min(m, n) + 1):
        for combo in itertools.combinations(range(n), size):
            dset = set(combo)
            if all(x in dset or any(y in dset for y in g0.out_adjacency[x]) for x in range(n)):
                return True
    return False


def nonisomorphic_digraphs(n: int, loops: bool = False) -> list:
    """One representative per isomorphism class of digraphs on ``n`` nodes.

    Arcs are encoded as bits of an integer mask; the canonical form of a
    mask is its minimum over all node permutations.
    """
    import numpy as np

    pairs = [(a, b) for a in range(n) for b in range(n) if loops or a != b]
    bit = {p: i for i, p in enumerate(pairs)}
    masks = np.arange(1 << len(pairs), dtype=np.int64)
    canon = masks.copy()
    planes = [(masks >> i) & 1 for i in range(len(pairs))]
    for perm in itertools.permutations(range(n)):
        if list(perm) == list(range(n)):
            continue
        image = np.zeros_like(masks)
        for (a, b), i in bit.items():
            image |= planes[i] << bit[(perm[a], perm[b])]
        np.minimum(canon, image, out=canon)
    reps = np.unique(canon)
    out = []
    for mask in reps.tolist():
        out.append(DirectedGraph(n, [p for p, i in bit.items() if mask >> i & 1]))
    return out
