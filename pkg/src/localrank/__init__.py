"""Ranking a few target nodes by PageRank while exploring as little of the graph as possible."""

from .explore import (
    ALL_QUERIES,
    DiscoveryError,
    ExplorationSession,
    ModelError,
    Query,
    QueryError,
    QueryResult,
    cost,
    open_session,
    q_crawl,
    q_jump,
    q_links,
)
from .graph import (
    DirectedGraph,
    EmptyGraphError,
    GraphError,
    InvalidNodeError,
    RankingOutcome,
    RankingParams,
    ScoreVector,
    contribution,
    contributions_to,
    epsilon_ranking,
    exact_pagerank,
    is_valid_ranking,
    pagerank_of,
    separated,
)
from .instances import (
    InfeasibleParameters,
    InstanceBundle,
    NoShortcut,
    ReductionArtifacts,
    close_dangling,
    gen_det_lb,
    gen_eluders,
    gen_mc_global_lb,
    gen_mc_local_lb,
    has_clique,
    has_dominating_set,
    reduce_clique,
    reduce_domset,
)
from .io import parse_graph_file, parse_visit_file, write_graph_file, write_visit_file
from .rank_subgraph import (
    NOT_FOUND,
    KernelScores,
    RankGraphVerdict,
    VisitSubgraph,
    WitnessCapExceeded,
    adversarial_witness,
    check_compatible,
    induced_visit_subgraph,
    kernel_scores,
    min_ranking_subgraph,
    rankgraph_decide,
    union_visit,
    verify_ranking_subgraph,
)
from .samplerank import (
    SampleRunStats,
    ScoreEstimate,
    backward_exploration_rank,
    confidence_interval,
    elude_rs,
    sample_cost_check,
    sample_node,
    sample_rank,
)
from .sweep import SweepConfig, run_cost_sweep

__version__ = "0.1.0"
