"""Community detection over super-peer expertise and 1-strategy routing.

Super-peers are clustered by the query components they can answer. Each
cluster (community) becomes a hyperedge over super-peer ids, and the minimal
transversals of that hypergraph are the routing strategies: minimal sets of
super-peers containing at least one member of every community.

A query is routed along a single strategy that contains the source
super-peer. If none does, the source super-peer first bridges to a strategy
member, which costs one extra message and one extra hop.
"""

from __future__ import annotations

import warnings
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

from ._order import format_set, natural_key, set_key, sort_labels
from .baseline import DEFAULT_THETA_PEER, Query, RoutingOutcome, collect
from .ecclat import Clustering, select_clusters
from .errors import InputError
from .hypergraph import Hypergraph, is_minimal_transversal, min_transversals_berge
from .mining import TransactionDataset, frequent_closed_patterns
from .network import Network
from .similarity import Similarity, relevance, term_similarity


class RoutingError(RuntimeError):
    pass


@dataclass(frozen=True)
class Community:
    pattern: frozenset
    super_peers: frozenset
    terms: frozenset = frozenset()

    def __post_init__(self):
        if not self.super_peers:
            raise ValueError("a community needs at least one super-peer")
        if not self.terms:
            object.__setattr__(self, "terms", frozenset(self.pattern))

    def __str__(self) -> str:
        return f"{format_set(self.pattern)} | {format_set(self.super_peers)}"


@dataclass(frozen=True)
class CommunitySet:
    communities: tuple[Community, ...]

    def __len__(self) -> int:
        return len(self.communities)

    def __iter__(self):
        return iter(self.communities)

    def terms_by_super_peer(self) -> dict[str, frozenset]:
        """Union of the community patterns (as terms) each super-peer belongs to."""
        out: dict[str, set] = {}
        for c in self.communities:
            for sp in c.super_peers:
                out.setdefault(sp, set()).update(c.terms)
        return {sp: frozenset(ts) for sp, ts in out.items()}


@dataclass(frozen=True)
class Strategy:
    super_peers: frozenset

    def __contains__(self, sp: str) -> bool:
        return sp in self.super_peers

    def __len__(self) -> int:
        return len(self.super_peers)

    def __str__(self) -> str:
        return " ".join(sort_labels(self.super_peers))


def expertise_dataset(net: Network, log: Iterable[tuple[str, Iterable[str]]] | None = None) -> TransactionDataset:
    """One transaction per super-peer; items are the query components it handles.

    With a processed-query ``log`` of ``(super_peer, components)`` entries the
    items come from the log; otherwise from the union of the attached peers'
    expertise. Terms map to item ids ``W1..Wn`` in natural term order.
    """
    terms_of: dict[str, set[str]] = {sp: set() for sp in net.super_peers}
    if log is None:
        for p in net.peers.values():
            terms_of[p.super_peer].update(p.expertise)
    else:
        for sp, components in log:
            if sp not in terms_of:
                raise KeyError(f"log names unknown super-peer {sp}")
            terms_of[sp].update(components)
    vocabulary = sort_labels(set().union(*terms_of.values())) if terms_of else []
    item_of = {t: f"W{i}" for i, t in enumerate(vocabulary, start=1)}
    transactions = {}
    for sp in sort_labels(terms_of):
        if not terms_of[sp]:
            warnings.warn(f"super-peer {sp} has no items and is left out of the dataset", stacklevel=2)
            continue
        transactions[sp] = {item_of[t] for t in terms_of[sp]}
    return TransactionDataset.from_transactions(transactions, {w: t for t, w in item_of.items()})


def communities_from_clustering(clustering: Clustering, labels: Mapping[str, str] | None = None) -> CommunitySet:
    labels = labels or {}
    return CommunitySet(tuple(
        Community(c.pattern, c.members, frozenset(labels.get(i, i) for i in c.pattern))
        for c in clustering.selected))


def build_communities(d: TransactionDataset, minfr, m: int) -> CommunitySet:
    clustering = select_clusters(frequent_closed_patterns(d, minfr), d, m, minfr=minfr)
    return communities_from_clustering(clustering, d.item_labels)


def build_strategies(cs: CommunitySet | Sequence[Community]) -> list[Strategy]:
    communities = list(cs)
    if not communities:
        raise ValueError("cannot build strategies from an empty community set")
    edges = list(dict.fromkeys(c.super_peers for c in communities))
    h = Hypergraph.from_edges(edges)
    out = []
    for t in min_transversals_berge(h):
        if not is_minimal_transversal(h, t):
            raise AssertionError(f"non-minimal strategy {sort_labels(t)}")
        out.append(Strategy(t))
    return sorted(out, key=lambda s: (len(s), set_key(s.super_peers)))


FilterFn = Callable[[Sequence[str], Mapping[str, float]], list[str]]


def prune_unrelated(members: Sequence[str], affinity: Mapping[str, float]) -> list[str]:
    """Keep members whose community patterns touch the query; all of them if none do."""
    kept = [sp for sp in members if affinity[sp] > 0]
    return kept or list(members)


def keep_all(members: Sequence[str], affinity: Mapping[str, float]) -> list[str]:
    return list(members)


def choose_bridge(net: Network, sp0: str, strategies: Sequence[Strategy]) -> str:
    members = set().union(*(s.super_peers for s in strategies))
    adjacent = members & net.super_peers[sp0].neighbors
    return sort_labels(adjacent or members)[0]


def one_strategy_route(net: Network, q: Query, strategies: Sequence[Strategy], theta_peer: float = DEFAULT_THETA_PEER,
                       communities: CommunitySet | None = None, sim: Similarity = term_similarity,
                       filter_fn: FilterFn = prune_unrelated) -> RoutingOutcome:
    if not strategies:
        raise RoutingError("no routing strategies built")
    if q.source not in net.peers:
        raise KeyError(f"unknown source peer {q.source}")
    sp0 = net.peers[q.source].super_peer
    subject = sorted(q.subject)
    sp_terms = communities.terms_by_super_peer() if communities is not None else {}

    messages, hops = 1, 1
    origin = sp0
    possible = [s for s in strategies if sp0 in s]
    if not possible:
        origin = choose_bridge(net, sp0, strategies)
        possible = [s for s in strategies if origin in s]
        messages += 1
        hops += 1

    def affinity(terms: Iterable[str]) -> float:
        return relevance(subject, sorted(terms), sim)

    def rank(s: Strategy):
        union = set().union(*(sp_terms.get(sp, ()) for sp in s.super_peers))
        return (-affinity(union), len(s), set_key(s.super_peers))

    chosen = min(possible, key=rank)
    members = sort_labels(chosen.super_peers)
    member_affinity = {sp: affinity(sp_terms.get(sp, ())) for sp in members}
    kept = filter_fn(members, member_affinity)

    forwards = [sp for sp in kept if sp != origin and sp != sp0]
    if forwards:
        messages += len(forwards)
        hops += 1
    contacted = list(dict.fromkeys([sp0, origin, *forwards]))
    answers, evaluations, responders = collect(net, q, contacted, theta_peer, sim)
    return RoutingOutcome(frozenset(answers), messages + responders, hops, evaluations, tuple(contacted))


class TraverseRouter:
    """Communities and strategies precomputed once for a network."""

    def __init__(self, net: Network, minfr=0.2, m: int = 1, log=None,
                 sim: Similarity = term_similarity, filter_fn: FilterFn = prune_unrelated):
        self.net = net
        self.sim = sim
        self.filter_fn = filter_fn
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            self.dataset = expertise_dataset(net, log)
        self.communities = build_communities(self.dataset, minfr, m)
        self.strategies = build_strategies(self.communities)

    def route(self, q: Query, theta_peer: float = DEFAULT_THETA_PEER) -> RoutingOutcome:
        return one_strategy_route(self.net, q, self.strategies, theta_peer, self.communities,
                                  self.sim, self.filter_fn)


def read_communities(path: str | Path) -> CommunitySet:
    """Parse ``{pattern} | {super-peers} [| ...]`` lines as written by the cluster commands."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(path, None, str(exc)) from exc
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split("|")]
        if len(fields) < 2:
            raise InputError(path, lineno, "expected '{pattern} | {super-peers}'")
        pattern, members = (parse_set(f, path, lineno) for f in fields[:2])
        if not members:
            raise InputError(path, lineno, "community has no super-peers")
        out.append(Community(pattern, members))
    if not out:
        raise InputError(path, None, "no communities found")
    return CommunitySet(tuple(out))


def parse_set(text: str, path, lineno) -> frozenset:
    if not (text.startswith("{") and text.endswith("}")):
        raise InputError(path, lineno, f"expected a braced set, got {text!r}")
    inner = text[1:-1].strip()
    return frozenset(x.strip() for x in inner.split(",") if x.strip())


def read_strategies(path: str | Path) -> list[Strategy]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(path, None, str(exc)) from exc
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append(Strategy(frozenset(line.split())))
    if not out:
        raise InputError(path, None, "no strategies found")
    return sorted(out, key=lambda s: (len(s), set_key(s.super_peers)))


def format_strategies(strategies: Iterable[Strategy]) -> str:
    return "".join(f"{s}\n" for s in strategies)


def strategy_members(strategies: Iterable[Strategy]) -> list[str]:
    return sorted(set().union(*(s.super_peers for s in strategies)), key=natural_key)
