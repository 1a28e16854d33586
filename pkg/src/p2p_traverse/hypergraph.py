"""Hypergraphs and their minimal transversals (minimal hitting sets).

Two independent enumerators are provided: an exhaustive subset scan that
serves as a reference oracle for small vertex sets, and Berge's incremental
algorithm which processes one hyperedge at a time. The number of minimal
transversals can be exponential in the size of the hypergraph, so neither
enumerator is meant for adversarially large inputs.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from ._order import natural_key, set_key, sort_labels
from .errors import InputError

VertexSet = frozenset

ORACLE_LIMIT = 20


class HypergraphError(ValueError):
    pass


@dataclass(frozen=True)
class Hypergraph:
    """A vertex set plus a list of non-empty hyperedges.

    Vertices are kept in natural sorted order. Identical hyperedges are
    rejected; superset hyperedges are kept as given.
    """

    vertices: tuple
    edges: tuple[frozenset, ...]

    def __init__(self, vertices: Iterable[Hashable] = (), edges: Iterable[Iterable[Hashable]] = ()):
        edge_list = [frozenset(e) for e in edges]
        universe = set(vertices)
        for e in edge_list:
            if not e:
                raise HypergraphError("hyperedges must be non-empty")
            universe |= e
        seen: set[frozenset] = set()
        for e in edge_list:
            if e in seen:
                raise HypergraphError(f"duplicate hyperedge {sort_labels(e)}")
            seen.add(e)
        object.__setattr__(self, "vertices", tuple(sort_labels(universe)))
        object.__setattr__(self, "edges", tuple(edge_list))

    @classmethod
    def from_edges(cls, edges: Iterable[Iterable[Hashable]]) -> Hypergraph:
        return cls((), edges)

    def _check_members(self, s: Iterable) -> frozenset:
        s = frozenset(s)
        unknown = s.difference(self.vertices)
        if unknown:
            raise HypergraphError(f"vertices not in hypergraph: {sort_labels(unknown)}")
        return s


def is_transversal(h: Hypergraph, s: Iterable) -> bool:
    s = h._check_members(s)
    return all(s & e for e in h.edges)


def is_minimal_transversal(h: Hypergraph, s: Iterable) -> bool:
    # Removing one vertex at a time is enough: hitting every edge is monotone.
    s = h._check_members(s)
    if not all(s & e for e in h.edges):
        return False
    return all(not all((s - {v}) & e for e in h.edges) for v in s)


def canonical(transversals: Iterable[frozenset]) -> list[frozenset]:
    return sorted((frozenset(t) for t in transversals), key=set_key)


def min_transversals_bruteforce(h: Hypergraph, limit: int = ORACLE_LIMIT) -> list[frozenset]:
    """Enumerate all 2^|V| subsets and keep the minimal transversals."""
    n = len(h.vertices)
    if n > limit:
        raise HypergraphError(f"brute-force oracle refused: {n} vertices exceeds limit {limit}")
    found = []
    # Scanning by increasing size lets minimality be checked against earlier hits.
    for k in range(n + 1):
        for combo in combinations(h.vertices, k):
            s = frozenset(combo)
            if is_minimal_transversal(h, s):
                found.append(s)
    return canonical(found)


def _minimize(sets: set[frozenset]) -> set[frozenset]:
    ordered = sorted(sets, key=len)
    kept: list[frozenset] = []
    for s in ordered:
        if not any(k <= s for k in kept):
            kept.append(s)
    return set(kept)


def min_transversals_berge(h: Hypergraph) -> list[frozenset]:
    """Berge's algorithm, processing edges in input order.

    Starts from the minimal transversals of the first edge (its singletons)
    and, for each further edge, extends every current transversal that misses
    it by one vertex of that edge, then discards non-minimal sets.
    """
    current: set[frozenset] = {frozenset()}
    for edge in h.edges:
        nxt: set[frozenset] = set()
        for t in current:
            if t & edge:
                nxt.add(t)
            else:
                nxt.update(t | {v} for v in edge)
        current = _minimize(nxt)
    return canonical(current)


def read_hypergraph(path: str | Path) -> Hypergraph:
    """Parse one hyperedge per line; ``#`` starts a comment line."""
    path = Path(path)
    edges = []
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(path, None, str(exc)) from exc
    seen: dict[frozenset, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        edge = frozenset(line.split())
        if edge in seen:
            raise InputError(path, lineno, f"duplicate hyperedge (first on line {seen[edge]})")
        seen[edge] = lineno
        edges.append(edge)
    if not edges:
        raise InputError(path, None, "no hyperedges found")
    return Hypergraph.from_edges(edges)


def format_transversal(t: Iterable) -> str:
    return " ".join(str(v) for v in sorted(t, key=natural_key))
