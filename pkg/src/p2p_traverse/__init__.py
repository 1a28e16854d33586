"""Query routing in super-peer P2P networks via minimal hypergraph transversals."""

from .baseline import Query, RoutingOutcome, cap, route_baseline
from .ecclat import Cluster, Clustering, select_clusters
from .hypergraph import (
    Hypergraph,
    is_minimal_transversal,
    is_transversal,
    min_transversals_berge,
    min_transversals_bruteforce,
)
from .mining import ClosedPattern, TransactionDataset, closure, frequent_closed_patterns
from .network import Network, load_topology
from .similarity import term_similarity
from .simulator import WorkloadConfig, precision, recall, run_experiment
from .traverse import CommunitySet, Strategy, TraverseRouter, build_strategies, one_strategy_route

__version__ = "0.1.0"
