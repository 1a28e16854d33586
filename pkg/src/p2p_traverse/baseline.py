"""Two-level semantic routing over super-peer themes (the comparison baseline).

The source peer hands its query to its super-peer. That super-peer scores
its own peers with :func:`cap` and forwards the query to every neighbor
whose theme is relevant enough; each neighbor scores its own peers and does
not forward further.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

from ._order import natural_key, sort_labels
from .network import Network, Peer, theme_relevance
from .similarity import Similarity, capacity, exact_similarity, term_similarity

__all__ = ["Query", "RoutingOutcome", "cap", "route_baseline", "term_similarity", "exact_similarity"]

DEFAULT_THETA_PEER = 0.5
DEFAULT_THETA_SP = 0.3


@dataclass(frozen=True)
class Query:
    id: str
    source: str
    subject: frozenset
    ttl: int = 2

    def __post_init__(self):
        object.__setattr__(self, "subject", frozenset(self.subject))
        if not self.subject:
            raise ValueError("query subject is empty")
        if self.ttl < 1:
            raise ValueError("ttl must be >= 1")


@dataclass(frozen=True)
class RoutingOutcome:
    answers: frozenset  # of (peer id, super-peer id)
    messages: int
    hop_depth: int
    cap_evaluations: int
    contacted: tuple = field(default=())

    @property
    def peers(self) -> frozenset:
        return frozenset(p for p, _ in self.answers)

    def to_record(self) -> dict:
        return {
            "answers": [[p, sp] for p, sp in sorted(self.answers, key=lambda a: (natural_key(a[0]), natural_key(a[1])))],
            "messages": self.messages,
            "hops": self.hop_depth,
            "cap_evaluations": self.cap_evaluations,
            "contacted": list(self.contacted),
        }


def cap(p: Peer, q: Query, sim: Similarity = term_similarity) -> float:
    return capacity(sorted(p.expertise), sorted(q.subject), sim)


def evaluate_peers(net: Network, sp_id: str, q: Query, theta_peer: float,
                   sim: Similarity) -> tuple[list[tuple[str, str]], int]:
    """Score every peer of ``sp_id``; return the (peer, sp) answers and evaluation count."""
    answers = []
    peers = net.peers_of(sp_id)
    for p in peers:
        if cap(p, q, sim) >= theta_peer:
            answers.append((p.id, sp_id))
    return answers, len(peers)


def collect(net: Network, q: Query, contacted: Iterable[str], theta_peer: float, sim: Similarity):
    answers: set[tuple[str, str]] = set()
    evaluations = 0
    responders = 0
    for sp_id in contacted:
        found, n = evaluate_peers(net, sp_id, q, theta_peer, sim)
        evaluations += n
        if found:
            responders += 1
            answers.update(found)
    return answers, evaluations, responders


def route_baseline(net: Network, q: Query, theta_peer: float = DEFAULT_THETA_PEER,
                   theta_sp: float = DEFAULT_THETA_SP, sim: Similarity = term_similarity) -> RoutingOutcome:
    if q.source not in net.peers:
        raise KeyError(f"unknown source peer {q.source}")
    home = net.peers[q.source].super_peer
    subject = sorted(q.subject)
    messages = 1
    hops = 1
    forwarded: list[str] = []
    if q.ttl >= 2:
        for nb in sort_labels(net.super_peers[home].neighbors):
            if theme_relevance(subject, net.super_peers[nb].theme, sim) >= theta_sp:
                forwarded.append(nb)
    if forwarded:
        messages += len(forwarded)
        hops = 2
    contacted = [home, *forwarded]
    answers, evaluations, responders = collect(net, q, contacted, theta_peer, sim)
    return RoutingOutcome(frozenset(answers), messages + responders, hops, evaluations, tuple(contacted))
