"""Overlapping clustering by selecting interesting frequent closed patterns.

Each candidate cluster is a closed pattern with its supporting transactions.
Candidates are scored by homogeneity and concentration, whose mean is the
interestingness. Selection is greedy: the best candidate first, then the best
remaining candidate that still brings at least ``m`` unclassified
transactions, until every transaction is classified or no candidate
qualifies.

The two measures are pluggable through :class:`Measures`.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from ._order import format_set, set_key
from .mining import ClosedPattern, TransactionDataset


def homogeneity(c: ClosedPattern, d: TransactionDataset) -> Fraction:
    """Frequency times the mean share of each supporting transaction the pattern describes."""
    share = sum(Fraction(len(c.pattern), len(d.transactions[t])) for t in c.support)
    return Fraction(len(c.support), len(d)) * share / len(c.support)


def concentration(c: ClosedPattern, candidates: Sequence[ClosedPattern]) -> Fraction:
    """Mean over supporting transactions of 1 / (number of candidates holding it)."""
    multiplicity = Counter(t for cand in candidates for t in cand.support)
    total = Fraction(0)
    for t in c.support:
        total += Fraction(1, max(1, multiplicity[t]))
    return total / len(c.support)


def interestingness(h, conc):
    return (h + conc) / 2


@dataclass(frozen=True)
class Measures:
    homogeneity: Callable[[ClosedPattern, TransactionDataset], Fraction] = homogeneity
    concentration: Callable[[ClosedPattern, Sequence[ClosedPattern]], Fraction] = concentration


@dataclass(frozen=True)
class Cluster:
    pattern: frozenset
    members: frozenset
    homogeneity: float
    concentration: float
    interestingness: float

    def __str__(self) -> str:
        return (f"{format_set(self.pattern)} | {format_set(self.members)} | "
                f"h={self.homogeneity:.4f} c={self.concentration:.4f} i={self.interestingness:.4f}")


@dataclass(frozen=True)
class Clustering:
    selected: tuple[Cluster, ...]
    unclassified: frozenset
    minfr: object = None
    m: int = 1
    scores: dict = field(default_factory=dict, compare=False, repr=False)


def score_candidates(candidates: Sequence[ClosedPattern], d: TransactionDataset,
                     measures: Measures = Measures()) -> dict[frozenset, tuple[Fraction, Fraction, Fraction]]:
    scores = {}
    for c in candidates:
        h = Fraction(measures.homogeneity(c, d))
        conc = Fraction(measures.concentration(c, candidates))
        scores[c.pattern] = (h, conc, interestingness(h, conc))
    return scores


def _make_cluster(c: ClosedPattern, score) -> Cluster:
    h, conc = float(score[0]), float(score[1])
    return Cluster(c.pattern, c.support, h, conc, (h + conc) / 2)


def select_clusters(candidates: Sequence[ClosedPattern], d: TransactionDataset, m: int,
                    measures: Measures = Measures(), minfr=None) -> Clustering:
    if m < 1:
        raise ValueError("m must be a positive integer")
    scores = score_candidates(candidates, d, measures)
    remaining = list(candidates)
    uncovered = set(d.transactions)
    selected: list[Cluster] = []

    def rank(c: ClosedPattern):
        new = len(c.support & uncovered)
        return (-scores[c.pattern][2], -new, set_key(c.pattern))

    first = True
    while remaining and (first or uncovered):
        eligible = remaining if first else [c for c in remaining if len(c.support & uncovered) >= m]
        if not eligible:
            break
        best = min(eligible, key=rank)
        remaining.remove(best)
        selected.append(_make_cluster(best, scores[best.pattern]))
        uncovered -= best.support
        first = False
    return Clustering(tuple(selected), frozenset(uncovered), minfr, m, scores)
