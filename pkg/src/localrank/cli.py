"""Command-line entry point: ``localrank <command> ...``.

Exit codes: 0 success, 1 usage or input error, 2 infeasible parameters,
3 query budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io as lio
from .explore import ALL_QUERIES, Query, open_session
from .graph import GraphError, RankingParams, exact_pagerank
from .instances import (
    InfeasibleParameters,
    NoShortcut,
    close_dangling,
    gen_det_lb,
    gen_eluders,
    gen_mc_global_lb,
    gen_mc_local_lb,
    reduce_clique,
    reduce_domset,
)
from .rank_subgraph import BudgetError, StructuralError, min_ranking_subgraph, verify_ranking_subgraph
from .samplerank import DEFAULT_MAX_QUERIES, elude_rs, sample_rank
from .sweep import COLUMNS, GENERATORS, SweepConfig, run_cost_sweep

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _params(a):
    return RankingParams(a.alpha, getattr(a, "epsilon", 0))


def _meta_path(path):
    return Path(str(path) + ".meta")


def _write_bundle(graph, meta, out):
    if out is None:
        sys.stdout.write(lio.format_graph(graph))
        sys.stdout.write("".join(f"# {line}\n" for line in lio.format_metadata(meta).splitlines()))
        return
    lio.write_graph_file(graph, out)
    lio.write_metadata(meta, _meta_path(out))
    print(f"wrote {out} and {_meta_path(out)}")


def _targets(a):
    if a.targets:
        return a.targets
    meta = _meta_path(a.graph)
    if meta.exists():
        raw = lio.read_metadata(meta).get("targets", "")
        if raw:
            return [int(x) for x in raw.split(",")]
    raise UsageError("no --targets given and no targets= entry in the metadata sidecar")


def cmd_gen(a):
    if a.family == "eluders":
        b = gen_eluders(a.m, a.alpha)
    else:
        b = GENERATORS[a.family](a.k, a.alpha, a.p, a.epsilon, a.m)
    meta = dict(b.declared)
    meta["targets"] = b.targets
    meta["nodes"] = b.graph.node_count
    _write_bundle(b.graph, meta, a.out)
    return EXIT_OK


def cmd_score(a):
    g = lio.parse_graph_file(a.graph)
    mode = "rational" if a.rational else "float"
    sv = exact_pagerank(g, RankingParams(a.alpha), mode)
    nodes = a.nodes if a.nodes else range(g.node_count)
    for v in nodes:
        print(f"{v} {sv[g.check_node(v)]}")
    return EXIT_OK


def cmd_rank(a):
    g = lio.parse_graph_file(a.graph)
    targets = _targets(a)
    s = open_session(g, targets, ALL_QUERIES, a.seed)
    stats = sample_rank(s, None, _params(a), a.eta, max_queries=a.max_queries)
    ranking = [s.internal_id(x) for x in stats.ranking]
    print("ranking " + " ".join(map(str, ranking)))
    print(f"status {stats.status} samples {stats.samples} queries {stats.queries}")
    for t, e in zip(targets, (stats.estimates[x] for x in s.targets)):
        print(f"target {t} hits {e.hits} estimate {e.p_hat:.6g} interval {e.lo:.6g} {e.hi:.6g}")
    return EXIT_BUDGET if stats.status == "budget_exceeded" else EXIT_OK


def cmd_verify(a):
    h = lio.parse_visit_file(a.visit)
    mode = "rational" if a.rational or not a.float else "float"
    verdict = verify_ranking_subgraph(h, a.u, a.v, _params(a), mode)
    if verdict.is_ranking_subgraph:
        print(f"ranking subgraph for {a.u} > {a.v}: yes")
    else:
        extra = "" if verdict.witness is None else f" at frontier node {verdict.witness}"
        print(f"ranking subgraph for {a.u} > {a.v}: no ({verdict.failing_condition}{extra})")
    return EXIT_OK


def cmd_minrank(a):
    g = lio.parse_graph_file(a.graph)
    res = min_ranking_subgraph(g, _targets(a), _params(a), node_budget=a.budget)
    print(f"size {res.size}")
    print("kernel " + " ".join(map(str, sorted(res.kernel))))
    print("order " + " ".join(map(str, res.order)))
    return EXIT_OK


def cmd_reduce(a):
    g0 = lio.parse_graph_file(a.graph)
    if a.problem == "clique":
        r = reduce_clique(g0, a.m, a.alpha, a.epsilon)
    else:
        r = reduce_domset(close_dangling(g0), a.m, a.alpha)
    if isinstance(r, NoShortcut):
        print(f"answer {'YES' if r.answer else 'NO'} without search: {r.reason}")
        return EXIT_OK
    meta = dict(problem=a.problem, m=a.m, alpha=r.params.alpha, epsilon=r.params.epsilon,
                targets=r.targets, r=r.r, d=r.d if r.d is not None else "", q=r.q if r.q is not None else "")
    _write_bundle(r.graph, meta, a.out)
    return EXIT_OK


def cmd_sweep(a):
    cfg = SweepConfig(
        family=a.family, p_values=tuple(a.p), epsilon=a.epsilon, alpha=a.alpha, k=a.k, eta=a.eta,
        m=a.m, trials=a.trials, seed=a.seed, out=a.out, mode=a.mode, gen_epsilon=a.gen_epsilon,
        max_queries=a.max_queries, no_timestamp=a.no_timestamp,
    )
    text = run_cost_sweep(cfg)
    if a.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_eluders(a):
    import math

    m = math.ceil(1 / a.eta) if a.m is None else a.m
    b = gen_eluders(m, a.alpha)
    params = RankingParams(a.alpha)
    u_first = 0
    for run in range(a.runs):
        s = open_session(b.graph, b.targets, Query.LINKS, a.seed + run)
        eu, ev = s.targets
        order = elude_rs(s, eu, ev, a.eta, params)
        u_first += order[0] == eu
    print(f"m {m} runs {a.runs} u_first {u_first}")
    return EXIT_OK


def _common(p, eta=False, epsilon=True):
    p.add_argument("--alpha", type=float, default=0.5, help="damping factor (default 0.5)")
    if epsilon:
        p.add_argument("--epsilon", type=float, default=0.0, help="separation epsilon (default 0)")
    if eta:
        p.add_argument("--eta", type=float, default=0.1, help="error probability (default 0.1)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="localrank", description="Local PageRank ranking toolkit.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate an instance family")
    p.add_argument("family", choices=sorted(GENERATORS) + ["eluders"])
    _common(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--p", type=float, default=0.1, help="nominal target score")
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--out", help="graph file; metadata goes to <out>.meta")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("score", help="exact PageRank scores")
    p.add_argument("graph")
    _common(p, epsilon=False)
    p.add_argument("--rational", action="store_true", help="exact fractions instead of floats")
    p.add_argument("--nodes", type=int, nargs="+")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("rank", help="rank targets with SampleRank")
    p.add_argument("graph")
    _common(p, eta=True)
    p.add_argument("--targets", type=int, nargs="+")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-queries", type=int, default=DEFAULT_MAX_QUERIES)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("verify", help="check a visit subgraph file for u > v")
    p.add_argument("visit")
    p.add_argument("u", type=int)
    p.add_argument("v", type=int)
    _common(p)
    p.add_argument("--rational", action="store_true", help="exact arithmetic (the default)")
    p.add_argument("--float", action="store_true", help="float arithmetic with 1e-9 slack")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("minrank", help="smallest ranking subgraph by exhaustive search")
    p.add_argument("graph")
    _common(p)
    p.add_argument("--targets", type=int, nargs="+")
    p.add_argument("--budget", type=int, default=22, help="max candidate nodes (default 22)")
    p.set_defaults(func=cmd_minrank)

    p = sub.add_parser("reduce", help="build a hardness reduction instance")
    p.add_argument("problem", choices=["clique", "domset"])
    p.add_argument("graph")
    p.add_argument("--m", type=int, required=True)
    _common(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser(
        "sweep", help="SampleRank cost scaling experiment (CSV)",
        description="CSV columns: " + ", ".join(COLUMNS) + ". See localrank.sweep for their meaning.",
    )
    p.add_argument("--family", choices=sorted(GENERATORS), default="mc_global_lb")
    p.add_argument("--p", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.025])
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--gen-epsilon", type=float, help="separation used by the generator (default: --epsilon)")
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--m", type=int, default=2000)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["samplerank", "baseline"], default="samplerank")
    p.add_argument("--max-queries", type=int, default=DEFAULT_MAX_QUERIES)
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("eluders", help="run EludeRS on its instance")
    _common(p, eta=True, epsilon=False)
    p.add_argument("--m", type=int, help="parents of v (default ceil(1/eta))")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eluders)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    try:
        return a.func(a)
    except (InfeasibleParameters, BudgetError) as exc:
        print(f"localrank: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, lio.FormatError, GraphError, StructuralError, OSError, ValueError) as exc:
        print(f"localrank: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
