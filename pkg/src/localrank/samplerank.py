"""Monte Carlo local ranking from jump and crawl queries.

``sample_node`` draws a node with probability proportional to its PageRank
(dangling nodes restart the walk), ``sample_rank`` keeps drawing until
exact binomial intervals separate or tie every pair of targets, and
``elude_rs`` is a links-only algorithm that is correct with high
probability while never seeing a ranking subgraph on its home instance.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from scipy.stats import beta as beta_dist

from .explore import ExplorationSession, ModelError, Query
from .graph import RankingParams, as_fraction, epsilon_ranking
from .rank_subgraph import kernel_scores

CHECKPOINT_START = 64
CHECKPOINT_GROWTH = 1.2
DEFAULT_MAX_QUERIES = 10 ** 8


def _require(s: ExplorationSession, needed: Query):
    missing = needed & ~s.model
    if missing:
        raise ModelError(f"model lacks {missing}")


def _coin_rng(s, rng):
    if rng is not None:
        return rng
    return random.Random(f"localrank-walk-{s.seed}")


def sample_node(s: ExplorationSession, alpha, rng: random.Random | None = None) -> int:
    """One draw from the (restart-at-dangling) PageRank distribution."""
    _require(s, Query.JUMP | Query.CRAWL)
    rng = _coin_rng(s, rng)
    a = float(alpha)
    x = s.jump_id()
    while rng.random() < a:
        c = s.crawl_id(x)
        x = s.jump_id() if c is None else c
    return x


def sample_cost_check(s: ExplorationSession, calls: int, alpha, rng: random.Random | None = None) -> float:
    """Mean number of queries per ``sample_node`` call over ``calls`` calls."""
    if calls < 1:
        raise ValueError("calls must be at least 1")
    rng = _coin_rng(s, rng)
    start = s.cost()
    for _ in range(calls):
        sample_node(s, alpha, rng)
    return (s.cost() - start) / calls


def confidence_interval(hits: int, m: int, level: float) -> tuple[float, float]:
    """Exact (Clopper-Pearson) two-sided binomial interval."""
    if not 0 < level < 1:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    if m < 1 or not 0 <= hits <= m:
        raise ValueError("need m >= 1 and 0 <= hits <= m")
    tail = (1 - level) / 2
    lo = 0.0 if hits == 0 else float(beta_dist.ppf(tail, hits, m - hits + 1))
    hi = 1.0 if hits == m else float(beta_dist.ppf(1 - tail, hits + 1, m - hits))
    return lo, hi


def checkpoints(start: int = CHECKPOINT_START, growth: float = CHECKPOINT_GROWTH):
    """Increasing sample counts ``ceil(start * growth**j)``."""
    last = 0
    j = 0
    while True:
        m = math.ceil(start * growth ** j)
        if m > last:
            yield m
            last = m
        j += 1


@dataclass(frozen=True)
class ScoreEstimate:
    hits: int
    m: int
    lo: float
    hi: float

    @property
    def p_hat(self) -> float:
        return self.hits / self.m


@dataclass
class SampleRunStats:
    status: str
    samples: int
    queries: int
    estimates: dict
    ranking: tuple
    stop_reasons: dict = field(default_factory=dict)


def _ratio(num, den):
    return math.inf if den == 0 else num / den


def _pair_reason(a: ScoreEstimate, b: ScoreEstimate, eps: float):
    if a.lo > b.hi or b.lo > a.hi:
        return "disjoint"
    if _ratio(a.hi, b.lo) <= 1 + eps or _ratio(b.hi, a.lo) <= 1 + eps:
        return "tie"
    return None


def sample_rank(
    s: ExplorationSession,
    targets=None,
    params: RankingParams | None = None,
    eta: float = 0.1,
    schedule=None,
    max_queries: int = DEFAULT_MAX_QUERIES,
    rng: random.Random | None = None,
) -> SampleRunStats:
    """Rank ``targets`` by sampling until every pair is resolved.

    A pair is resolved when its intervals are disjoint or when one upper
    end is within ``1+epsilon`` of the other lower end.  Intervals use
    level ``1 - eta/(2k)`` and are refreshed at the ``schedule``
    checkpoints.  Running out of ``max_queries`` gives status
    ``"budget_exceeded"`` with the partial statistics.
    """
    _require(s, Query.JUMP | Query.CRAWL)
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    params = params or RankingParams()
    targets = list(s.targets if targets is None else targets)
    if not targets or len(set(targets)) != len(targets):
        raise ValueError("targets must be distinct and nonempty")
    rng = _coin_rng(s, rng)
    k = len(targets)
    level = 1 - eta / (2 * k)
    eps = float(params.epsilon)
    a = float(params.alpha)
    hits = {t: 0 for t in targets}
    schedule = iter(schedule) if schedule is not None else checkpoints()
    start = s.cost()
    m = 0
    jump, crawl, coin = s.jump_id, s.crawl_id, rng.random
    status = "ok"
    reasons = {}
    estimates = {}
    for goal in schedule:
        while m < goal:
            x = jump()
            while coin() < a:
                c = crawl(x)
                x = jump() if c is None else c
            m += 1
            if x in hits:
                hits[x] += 1
            if s.cost() - start >= max_queries:
                status = "budget_exceeded"
                break
        estimates = {t: ScoreEstimate(hits[t], m, *confidence_interval(hits[t], m, level)) for t in targets}
        if status != "ok":
            break
        reasons = {}
        done = True
        for i, ti in enumerate(targets):
            for tj in targets[i + 1:]:
                r = _pair_reason(estimates[ti], estimates[tj], eps)
                if r is None:
                    done = False
                    break
                reasons[(ti, tj)] = r
            if not done:
                break
        if done:
            break
    else:
        status = "schedule_exhausted"
    ranking = tuple(sorted(targets, key=lambda t: -hits[t]))
    return SampleRunStats(status, m, s.cost() - start, estimates, ranking, reasons)


def _exact_rank_by_ancestors(s: ExplorationSession, targets, params):
    """Query ``links`` on every ancestor of the targets and rank exactly."""
    seen = set(targets)
    stack = list(targets)
    while stack:
        x = stack.pop()
        res = s.linked.get(x) or s.links(x)
        for p in res.parents:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    ks = kernel_scores(s.visit_subgraph(), params, targets, "rational")
    return epsilon_ranking(ks.score, list(targets), params).order


def elude_rs(s: ExplorationSession, u: int, v: int, eta: float, params: RankingParams, rng: random.Random | None = None) -> tuple:
    """Rank ``u, v`` with ``links`` queries only; returns the order as a tuple.

    On the instance where ``u`` has ``m+1`` orphan parents and ``v`` has
    ``m`` (``m = ceil(1/eta)``) it leaves one parent of ``v`` unexplored and
    answers ``u`` first.  Everywhere else it explores all ancestors.
    """
    _require(s, Query.LINKS)
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    rng = random.Random(f"localrank-elude-{s.seed}") if rng is None else rng
    m = math.ceil(Fraction(1) / as_fraction(eta))
    lu = s.links(u)
    lv = s.links(v)

    def shape(res, x):
        parents = [p for p in res.parents if p != x]
        children = [c for c in res.children if c != x]
        return parents, children, x in res.children

    pu, cu, loop_u = shape(lu, u)
    pv, cv, loop_v = shape(lv, v)
    if len(pu) == m + 1 and not cu and len(pv) == m and not cv and loop_u == loop_v and v not in pu and u not in pv:
        skip = pv[rng.randrange(len(pv))]
        ok = True
        for p in pu + [p for p in pv if p != skip]:
            res = s.links(p)
            if res.parents or len(res.children) != 1:
                ok = False
        if ok:
            return (u, v)
    return tuple(_exact_rank_by_ancestors(s, [u, v], params))


def backward_exploration_rank(s: ExplorationSession, targets, params: RankingParams) -> tuple:
    """Links-only baseline: explore every ancestor, then rank exactly."""
    _require(s, Query.LINKS)
    return tuple(_exact_rank_by_ancestors(s, list(targets), params))
