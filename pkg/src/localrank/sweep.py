"""Cost-scaling experiments over a grid of target scores.

Each cell builds one instance of a generator family at a nominal score
``p`` and runs independent trials on it, either SampleRank (Monte Carlo,
all query types) or the links-only backward exploration baseline.  Rows
are written in (cell, trial) order with seeds derived from the cell and
trial index, so equal configurations give byte-identical CSV.

CSV columns:
  row_type     trial | summary | fit | infeasible
  cell         grid index of the p value
  family       generator family tag
  p_value      nominal score handed to the generator
  p_min        smallest exact target score of the instance
  seed         session seed (trial rows)
  k, alpha, epsilon, eta   ranking parameters
  m            SampleNode calls (trial), their mean (summary)
  queries      oracle queries (trial), their mean (summary)
  correct      1/0 (trial), empirical rate (summary)
  stop_reason  ok-run pair outcome (disjoint, tie, mixed, single), budget_exceeded,
               exhausted (baseline), or the infeasibility message
  delta        summary: correct rate minus 1/k!
  slope        fit: least-squares slope of log(mean queries) on log(1/p_min)
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from .explore import ALL_QUERIES, Query, open_session
from .graph import RankingParams, is_valid_ranking
from .instances import InfeasibleParameters, gen_det_lb, gen_mc_global_lb, gen_mc_local_lb
from .samplerank import DEFAULT_MAX_QUERIES, backward_exploration_rank, sample_rank

COLUMNS = (
    "row_type", "cell", "family", "p_value", "p_min", "seed", "k", "alpha", "epsilon",
    "eta", "m", "queries", "correct", "stop_reason", "delta", "slope",
)

GENERATORS = {
    "det_lb": gen_det_lb,
    "mc_local_lb": gen_mc_local_lb,
    "mc_global_lb": gen_mc_global_lb,
}


@dataclass
class SweepConfig:
    family: str = "mc_global_lb"
    p_values: tuple = (0.2, 0.1, 0.05, 0.025)
    epsilon: float = 0.5
    alpha: float = 0.5
    k: int = 2
    eta: float = 0.1
    m: int = 2000
    trials: int = 200
    seed: int = 0
    out: str | None = None
    mode: str = "samplerank"
    gen_epsilon: float | None = None
    max_queries: int = DEFAULT_MAX_QUERIES
    no_timestamp: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.p_values:
            raise ValueError("p grid must be nonempty")
        if self.mode not in ("samplerank", "baseline"):
            raise ValueError(f"unknown sweep mode {self.mode!r}")
        if self.family not in GENERATORS:
            raise ValueError(f"unknown family {self.family!r}; choose from {sorted(GENERATORS)}")
        if self.mode == "baseline" and self.family != "mc_local_lb":
            raise ValueError("the baseline mode runs on mc_local_lb instances")

    def trial_seed(self, cell: int, trial: int) -> int:
        return self.seed + cell * self.trials + trial


def _fmt(x):
    if x is None or x == "":
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, Fraction)):
        return f"{float(x):.10g}"
    return str(x)


def _pair_summary(reasons):
    kinds = set(reasons.values())
    if not kinds:
        return "single"
    return kinds.pop() if len(kinds) == 1 else "mixed"


def build_instance(cfg: SweepConfig, p):
    eps_gen = cfg.epsilon if cfg.gen_epsilon is None else cfg.gen_epsilon
    return GENERATORS[cfg.family](cfg.k, cfg.alpha, p, eps_gen, cfg.m)


def run_trial(cfg: SweepConfig, bundle, scores, params, seed):
    """One trial; returns (samples, queries, correct, stop_reason)."""
    if cfg.mode == "baseline":
        s = open_session(bundle.graph, bundle.targets, Query.LINKS, seed)
        order = backward_exploration_rank(s, s.targets, params)
        order = [s.internal_id(x) for x in order]
        return 0, s.cost(), is_valid_ranking(scores, order, params), "exhausted"
    s = open_session(bundle.graph, bundle.targets, ALL_QUERIES, seed)
    stats = sample_rank(s, None, params, cfg.eta, max_queries=cfg.max_queries)
    if stats.status != "ok":
        return stats.samples, stats.queries, False, stats.status
    order = [s.internal_id(x) for x in stats.ranking]
    return stats.samples, stats.queries, is_valid_ranking(scores, order, params), _pair_summary(stats.stop_reasons)


def sweep_rows(cfg: SweepConfig) -> list[dict]:
    params = RankingParams(cfg.alpha, cfg.epsilon)
    base = dict(family=cfg.family, k=cfg.k, alpha=cfg.alpha, epsilon=cfg.epsilon, eta=cfg.eta)
    rows, fit_x, fit_y = [], [], []
    chance = 1 / math.factorial(cfg.k)
    for cell, p in enumerate(cfg.p_values):
        try:
            bundle = build_instance(cfg, p)
        except InfeasibleParameters as exc:
            rows.append(dict(base, row_type="infeasible", cell=cell, p_value=p, stop_reason=str(exc)))
            continue
        scores = bundle.scores("rational")
        p_min = min(scores.values())
        cell_base = dict(base, cell=cell, p_value=p, p_min=p_min)
        results = []
        for trial in range(cfg.trials):
            seed = cfg.trial_seed(cell, trial)
            samples, queries, correct, reason = run_trial(cfg, bundle, scores, params, seed)
            results.append((samples, queries, correct))
            rows.append(dict(cell_base, row_type="trial", seed=seed, m=samples, queries=queries, correct=correct, stop_reason=reason))
        mean_m = sum(r[0] for r in results) / len(results)
        mean_q = sum(r[1] for r in results) / len(results)
        rate = sum(r[2] for r in results) / len(results)
        rows.append(dict(cell_base, row_type="summary", m=mean_m, queries=mean_q, correct=rate, delta=rate - chance))
        fit_x.append(math.log(1 / float(p_min)))
        fit_y.append(math.log(mean_q))
    if len(fit_x) >= 2:
        slope = float(np.polyfit(fit_x, fit_y, 1)[0])
        rows.append(dict(base, row_type="fit", slope=slope))
    return rows


def rows_to_csv(rows, timestamp: str | None = None) -> str:
    buf = io.StringIO()
    if timestamp is not None:
        buf.write(f"# generated {timestamp}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in COLUMNS])
    return buf.getvalue()


def run_cost_sweep(cfg: SweepConfig) -> str:
    """Run the sweep and return the CSV text, also writing it to ``cfg.out``."""
    stamp = None if cfg.no_timestamp else datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    text = rows_to_csv(sweep_rows(cfg), stamp)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


def read_sweep_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
