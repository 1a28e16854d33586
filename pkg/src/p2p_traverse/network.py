"""Hybrid super-peer overlay: peers, super-peers with themes, and links.

Topology documents are JSON objects of the form::

    {
      "superpeers": [
        {"id": "SP1",
         "theme": {"concepts": ["car", "engine"],
                   "roles": [["car", "has", "engine"]],
                   "isa": [["engine", "part"]]},
         "neighbors": ["SP2"]}
      ],
      "peers": [
        {"id": "P1", "expertise": ["car"], "superpeer": "SP1"}
      ]
    }

A super-peer's member list is derived from the ``superpeer`` field of its
peers. Neighbor links must be listed on both ends.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from pathlib import Path

from ._order import sort_labels
from .errors import InputError
from .similarity import Similarity, relevance, term_similarity


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class ThemeDescription:
    concepts: frozenset
    roles: frozenset = frozenset()
    isa: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "concepts", frozenset(self.concepts))
        object.__setattr__(self, "roles", frozenset(tuple(r) for r in self.roles))
        object.__setattr__(self, "isa", frozenset(tuple(r) for r in self.isa))
        for dom, _label, cod in self.roles:
            if dom not in self.concepts or cod not in self.concepts:
                raise TopologyError(f"role endpoint not a concept: {(dom, _label, cod)}")
        for sub, sup in self.isa:
            if sub not in self.concepts or sup not in self.concepts:
                raise TopologyError(f"isa endpoint not a concept: {(sub, sup)}")
        graph: dict[str, set[str]] = {}
        for sub, sup in self.isa:
            graph.setdefault(sub, set()).add(sup)
        try:
            tuple(TopologicalSorter(graph).static_order())
        except CycleError as exc:
            raise TopologyError(f"isa cycle: {exc.args[1]}") from None


@dataclass
class Peer:
    id: str
    expertise: frozenset
    super_peer: str

    def __post_init__(self):
        self.expertise = frozenset(self.expertise)
        if not self.expertise:
            raise TopologyError(f"peer {self.id} has empty expertise")


@dataclass
class SuperPeer:
    id: str
    theme: ThemeDescription
    peers: set = field(default_factory=set)
    neighbors: set = field(default_factory=set)


@dataclass(frozen=True)
class DomainAdvertisement:
    pid: str
    expertise: frozenset
    topic: str
    epsilon_acc: float
    ttl: int = 1

    def __post_init__(self):
        object.__setattr__(self, "expertise", frozenset(self.expertise))
        if self.ttl < 1:
            raise ValueError("ttl must be >= 1")
        if not 0.0 <= self.epsilon_acc <= 1.0:
            raise ValueError("epsilon_acc must lie in [0, 1]")


@dataclass(frozen=True)
class AdvertisementResult:
    accepted: bool
    similarity: float


@dataclass
class Network:
    peers: dict[str, Peer] = field(default_factory=dict)
    super_peers: dict[str, SuperPeer] = field(default_factory=dict)

    def validate(self) -> None:
        for sp in self.super_peers.values():
            if sp.id in sp.neighbors:
                raise TopologyError(f"self-loop on super-peer {sp.id}")
            for nb in sp.neighbors:
                if nb not in self.super_peers:
                    raise TopologyError(f"dangling super-peer reference: {sp.id} -> {nb}")
                if sp.id not in self.super_peers[nb].neighbors:
                    raise TopologyError(f"asymmetric neighbor link {sp.id} -> {nb}")
            for pid in sp.peers:
                if pid not in self.peers or self.peers[pid].super_peer != sp.id:
                    raise TopologyError(f"peer list of {sp.id} disagrees with peer {pid}")
        for p in self.peers.values():
            if p.super_peer not in self.super_peers:
                raise TopologyError(f"dangling super-peer reference: peer {p.id} -> {p.super_peer}")
            if p.id not in self.super_peers[p.super_peer].peers:
                raise TopologyError(f"peer {p.id} missing from {p.super_peer}'s peer list")

    def peers_of(self, sp_id: str) -> list[Peer]:
        return [self.peers[p] for p in sort_labels(self.super_peers[sp_id].peers)]

    def add_peer(self, peer: Peer) -> None:
        if peer.id in self.peers:
            raise TopologyError(f"duplicate peer id {peer.id}")
        if peer.super_peer not in self.super_peers:
            raise TopologyError(f"dangling super-peer reference: peer {peer.id} -> {peer.super_peer}")
        self.peers[peer.id] = peer
        self.super_peers[peer.super_peer].peers.add(peer.id)

    def link(self, a: str, b: str) -> None:
        if a == b:
            raise TopologyError(f"self-loop on super-peer {a}")
        self.super_peers[a].neighbors.add(b)
        self.super_peers[b].neighbors.add(a)

    def to_dict(self) -> dict:
        sps = []
        for sid in sort_labels(self.super_peers):
            sp = self.super_peers[sid]
            sps.append({
                "id": sid,
                "theme": {
                    "concepts": sorted(sp.theme.concepts),
                    "roles": [list(r) for r in sorted(sp.theme.roles)],
                    "isa": [list(r) for r in sorted(sp.theme.isa)],
                },
                "neighbors": sort_labels(sp.neighbors),
            })
        peers = [{"id": pid, "expertise": sorted(self.peers[pid].expertise),
                  "superpeer": self.peers[pid].super_peer}
                 for pid in sort_labels(self.peers)]
        return {"superpeers": sps, "peers": peers}


def _require(obj: dict, key: str, ctx: str):
    if not isinstance(obj, dict) or key not in obj:
        raise TopologyError(f"{ctx}: missing field {key!r}")
    return obj[key]


def network_from_dict(doc: dict) -> Network:
    net = Network()
    for i, raw in enumerate(_require(doc, "superpeers", "topology")):
        sid = str(_require(raw, "id", f"superpeers[{i}]"))
        if sid in net.super_peers:
            raise TopologyError(f"duplicate super-peer id {sid}")
        theme_doc = raw.get("theme", {})
        theme = ThemeDescription(
            frozenset(theme_doc.get("concepts", ())),
            frozenset(tuple(r) for r in theme_doc.get("roles", ())),
            frozenset(tuple(r) for r in theme_doc.get("isa", ())),
        )
        neighbors = {str(n) for n in raw.get("neighbors", ())}
        net.super_peers[sid] = SuperPeer(sid, theme, set(), neighbors)
    for i, raw in enumerate(_require(doc, "peers", "topology")):
        pid = str(_require(raw, "id", f"peers[{i}]"))
        sp = str(_require(raw, "superpeer", f"peers[{i}]"))
        net.add_peer(Peer(pid, frozenset(_require(raw, "expertise", f"peers[{i}]")), sp))
    net.validate()
    return net


def load_topology(source: str | Path | dict) -> Network:
    """Build and validate a network from a JSON document, path or parsed dict."""
    if isinstance(source, dict):
        return network_from_dict(source)
    path = Path(source)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise InputError(path, None, str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise InputError(path, exc.lineno, f"invalid JSON: {exc.msg}") from exc
    try:
        return network_from_dict(doc)
    except TopologyError as exc:
        raise InputError(path, None, str(exc)) from exc


def dump_topology(net: Network) -> str:
    return json.dumps(net.to_dict(), indent=2) + "\n"


def theme_relevance(subject: Iterable[str], theme: ThemeDescription, sim: Similarity = term_similarity) -> float:
    return relevance(subject, sorted(theme.concepts), sim)


def advertise(net: Network, da: DomainAdvertisement, target: str,
              sim: Similarity = term_similarity) -> AdvertisementResult:
    """Ask ``target`` to map an advertised expertise onto its theme; attach the peer on success."""
    if target not in net.super_peers:
        raise TopologyError(f"unknown super-peer {target}")
    if not da.expertise:
        raise ValueError("advertised expertise is empty")
    current = net.peers.get(da.pid)
    if current is not None and current.super_peer != target:
        raise TopologyError(f"peer {da.pid} already attached to {current.super_peer}")
    score = theme_relevance(sorted(da.expertise), net.super_peers[target].theme, sim)
    if score < da.epsilon_acc:
        return AdvertisementResult(False, score)
    if current is None:
        net.add_peer(Peer(da.pid, da.expertise, target))
    else:
        current.expertise = da.expertise
    return AdvertisementResult(True, score)
