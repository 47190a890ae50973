"""Directed graphs, exact PageRank scores and ground-truth epsilon-rankings.

Scores follow the random-surfer series directly on the graph as given:
a walk that reaches a node without children simply stops, so on graphs
with dangling nodes the scores sum to less than one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from ._linalg import series_fixed_point, solve_fixed_point, tail_steps

RATIONAL_BLOCK_CAP = 512


class GraphError(ValueError):
    pass


class EmptyGraphError(GraphError):
    pass


class InvalidNodeError(GraphError):
    pass


class DirectedGraph:
    """Immutable directed graph on nodes ``0..n-1``; self-loops allowed."""

    __slots__ = ("node_count", "arcs", "out_adjacency", "in_adjacency", "_hash")

    def __init__(self, node_count: int, arcs: Iterable[tuple[int, int]] = ()):
        node_count = int(node_count)
        if node_count < 0:
            raise GraphError("node_count must be non-negative")
        out = [[] for _ in range(node_count)]
        inn = [[] for _ in range(node_count)]
        seen = set()
        for a in arcs:
            s, t = int(a[0]), int(a[1])
            if not (0 <= s < node_count and 0 <= t < node_count):
                raise InvalidNodeError(f"arc ({s}, {t}) outside 0..{node_count - 1}")
            if (s, t) in seen:
                raise GraphError(f"duplicate arc ({s}, {t})")
            seen.add((s, t))
        for s, t in sorted(seen):
            out[s].append(t)
            inn[t].append(s)
        self.node_count = node_count
        self.arcs = tuple(sorted(seen))
        self.out_adjacency = tuple(tuple(x) for x in out)
        self.in_adjacency = tuple(tuple(sorted(x)) for x in inn)
        self._hash = None

    def __len__(self):
        return self.node_count

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self.node_count == other.node_count and self.arcs == other.arcs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.node_count, self.arcs))
        return self._hash

    def __repr__(self):
        return f"DirectedGraph(n={self.node_count}, arcs={len(self.arcs)})"

    def out_degree(self, v: int) -> int:
        return len(self.out_adjacency[v])

    def in_degree(self, v: int) -> int:
        return len(self.in_adjacency[v])

    def has_arc(self, s: int, t: int) -> bool:
        row = self.out_adjacency[s]
        i = _bisect(row, t)
        return i < len(row) and row[i] == t

    def dangling(self) -> list[int]:
        return [v for v in range(self.node_count) if not self.out_adjacency[v]]

    def check_node(self, v) -> int:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise InvalidNodeError(f"node id {v!r} is not an integer")
        v = int(v)
        if not 0 <= v < self.node_count:
            raise InvalidNodeError(f"node id {v} outside 0..{self.node_count - 1}")
        return v

    def ancestors(self, nodes: Iterable[int]) -> set[int]:
        """Nodes with a path (possibly empty) to some node in ``nodes``."""
        return _closure(self.in_adjacency, nodes)

    def descendants(self, nodes: Iterable[int]) -> set[int]:
        return _closure(self.out_adjacency, nodes)

    def with_arcs(self, extra_nodes: int = 0, extra_arcs: Iterable = ()) -> "DirectedGraph":
        return DirectedGraph(self.node_count + extra_nodes, list(self.arcs) + list(extra_arcs))

    def relabel(self, perm: Sequence[int]) -> "DirectedGraph":
        """Graph with node ``i`` renamed ``perm[i]``."""
        return DirectedGraph(self.node_count, [(perm[s], perm[t]) for s, t in self.arcs])


def _bisect(row, t):
    lo, hi = 0, len(row)
    while lo < hi:
        mid = (lo + hi) // 2
        if row[mid] < t:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _closure(adj, nodes):
    seen = set(nodes)
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class RankingParams:
    """Damping factor ``alpha`` and separation ``epsilon``, stored exactly.

    Floats are read through their shortest decimal representation, so
    ``RankingParams(0.3)`` holds exactly 3/10.
    """

    alpha: Fraction = Fraction(1, 2)
    epsilon: Fraction = Fraction(0)

    def __post_init__(self):
        a = as_fraction(self.alpha)
        e = as_fraction(self.epsilon)
        if not 0 < a < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {a}")
        if e < 0:
            raise ValueError(f"epsilon must be non-negative, got {e}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "epsilon", e)


@dataclass(frozen=True)
class ScoreVector:
    values: tuple
    mode: str

    def __getitem__(self, v):
        return self.values[v]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def as_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.values])

    def total(self):
        return sum(self.values, Fraction(0) if self.mode == "rational" else 0.0)


@dataclass(frozen=True)
class RankingOutcome:
    order: tuple
    tie_classes: tuple


def _check_mode(mode):
    if mode not in ("float", "rational"):
        raise ValueError(f"mode must be 'float' or 'rational', got {mode!r}")


def _transition(g: DirectedGraph, restrict=None):
    """Coefficients of ``P(v) = r + alpha * sum_{(z,v)} P(z)/outdeg(z)``."""
    if restrict is None:
        index = None
        nodes = range(g.node_count)
    else:
        nodes = sorted(restrict)
        index = {v: i for i, v in enumerate(nodes)}
    coeffs = []
    for v in nodes:
        row = {}
        for z in g.in_adjacency[v]:
            j = z if index is None else index[z]
            row[j] = Fraction(1, g.out_degree(z))
        coeffs.append(row)
    return list(nodes), coeffs


def exact_pagerank(g: DirectedGraph, params: RankingParams, mode: str = "float", tol: float = 1e-12) -> ScoreVector:
    """PageRank of every node of ``g``.

    In float mode the series is summed until its geometric tail drops below
    ``tol``, which bounds the per-node error.  Rational mode is exact.
    """
    _check_mode(mode)
    n = g.node_count
    if n == 0:
        raise EmptyGraphError("PageRank of an empty graph is undefined")
    if mode == "rational":
        _, coeffs = _transition(g)
        base = (1 - params.alpha) / n
        x = solve_fixed_point(coeffs, [[base] * n], params.alpha, RATIONAL_BLOCK_CAP)[0]
        return ScoreVector(tuple(x), "rational")
    if not tol > 0:
        raise ValueError("tol must be positive")
    a = float(params.alpha)
    src = np.fromiter((s for s, _ in g.arcs), dtype=np.int64, count=len(g.arcs))
    dst = np.fromiter((t for _, t in g.arcs), dtype=np.int64, count=len(g.arcs))
    outdeg = np.bincount(src, minlength=n).astype(float)
    w = 1.0 / outdeg[src] if len(src) else np.zeros(0)
    mt = sp.csr_matrix((w, (dst, src)), shape=(n, n))
    x = np.full(n, 1.0 / n)
    total = x.copy()
    for _ in range(tail_steps(a, tol)):
        x = a * (mt @ x)
        total += x
    return ScoreVector(tuple(((1 - a) * total).tolist()), "float")


def pagerank_of(g: DirectedGraph, params: RankingParams, nodes: Iterable[int], mode: str = "float", tol: float = 1e-12) -> dict:
    """Scores of ``nodes`` only, solving on their ancestor closure."""
    _check_mode(mode)
    if g.node_count == 0:
        raise EmptyGraphError("PageRank of an empty graph is undefined")
    nodes = [g.check_node(v) for v in nodes]
    order, coeffs = _transition(g, g.ancestors(nodes))
    n = g.node_count
    if mode == "rational":
        base = (1 - params.alpha) / n
        x = solve_fixed_point(coeffs, [[base] * len(order)], params.alpha, RATIONAL_BLOCK_CAP)[0]
    else:
        a = float(params.alpha)
        x = series_fixed_point(coeffs, [[(1 - a) / n] * len(order)], a, tol, "l1")[0]
    pos = {v: i for i, v in enumerate(order)}
    return {v: x[pos[v]] for v in nodes}


def contributions_to(g: DirectedGraph, params: RankingParams, v: int, mode: str = "rational", tol: float = 1e-12) -> dict:
    """``{z: P(z, v)}`` for every ancestor ``z`` of ``v`` (others contribute 0)."""
    _check_mode(mode)
    v = g.check_node(v)
    region = sorted(g.ancestors([v]))
    pos = {x: i for i, x in enumerate(region)}
    coeffs = []
    for z in region:
        d = g.out_degree(z)
        coeffs.append({pos[y]: Fraction(1, d) for y in g.out_adjacency[z] if y in pos})
    n = g.node_count
    if mode == "rational":
        r = [Fraction(0)] * len(region)
        r[pos[v]] = (1 - params.alpha) / n
        x = solve_fixed_point(coeffs, [r], params.alpha, RATIONAL_BLOCK_CAP)[0]
    else:
        a = float(params.alpha)
        r = [0.0] * len(region)
        r[pos[v]] = (1 - a) / n
        x = series_fixed_point(coeffs, [r], a, tol, "inf")[0]
    return {z: x[pos[z]] for z in region}


def all_contributions(g: DirectedGraph, params: RankingParams, mode: str = "rational", tol: float = 1e-12) -> list:
    """``out[v][z] = P(z, v)`` for every pair of nodes, from one solve."""
    _check_mode(mode)
    n = g.node_count
    if n == 0:
        raise EmptyGraphError("PageRank of an empty graph is undefined")
    coeffs = [{y: Fraction(1, g.out_degree(z)) for y in g.out_adjacency[z]} for z in range(n)]
    exact = mode == "rational"
    base = (1 - params.alpha) / n if exact else (1 - float(params.alpha)) / n
    zero = Fraction(0) if exact else 0.0
    rhs = [[base if i == v else zero for i in range(n)] for v in range(n)]
    if exact:
        return solve_fixed_point(coeffs, rhs, params.alpha, RATIONAL_BLOCK_CAP)
    return series_fixed_point(coeffs, rhs, float(params.alpha), tol, "inf")


def contribution(g: DirectedGraph, params: RankingParams, z: int, v: int, mode: str = "rational", tol: float = 1e-12):
    """Contribution ``P(z, v)`` of walks started at ``z`` to the score of ``v``."""
    z = g.check_node(z)
    v = g.check_node(v)
    zero = Fraction(0) if mode == "rational" else 0.0
    return contributions_to(g, params, v, mode, tol).get(z, zero)


def separated(a, b, epsilon) -> bool:
    """True when the larger of ``a, b`` is at least ``1+epsilon`` times the other.

    Equal scores are never separated, even for ``epsilon = 0``.
    """
    hi, lo = (a, b) if a >= b else (b, a)
    if hi == lo:
        return False
    if isinstance(hi, float) or isinstance(lo, float):
        return hi >= (1 + float(epsilon)) * lo
    return hi >= (1 + epsilon) * lo


def epsilon_ranking(scores, targets: Sequence[int], params: RankingParams) -> RankingOutcome:
    """Ground-truth ranking of ``targets``.

    Targets are sorted by score (input order breaks exact ties) and cut into
    tie classes wherever two consecutive scores are separated.
    """
    targets = list(targets)
    if not targets:
        raise ValueError("empty target list")
    if len(set(targets)) != len(targets):
        raise ValueError("targets must be distinct")
    order = sorted(targets, key=lambda t: -scores[t])
    classes = [[order[0]]]
    for prev, cur in zip(order, order[1:]):
        if separated(scores[prev], scores[cur], params.epsilon):
            classes.append([cur])
        else:
            classes[-1].append(cur)
    return RankingOutcome(tuple(order), tuple(tuple(c) for c in classes))


def is_valid_ranking(scores, order: Sequence[int], params: RankingParams) -> bool:
    """A ranking is valid unless some later node is separated above an earlier one."""
    order = list(order)
    for i, a in enumerate(order):
        for b in order[i + 1:]:
            if scores[b] > scores[a] and separated(scores[a], scores[b], params.epsilon):
                return False
    return True
