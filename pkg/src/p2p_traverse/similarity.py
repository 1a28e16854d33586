"""Term similarity functions and the expertise capacity score."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from functools import lru_cache

Similarity = Callable[[str, str], float]


def exact_similarity(s: str, e: str) -> float:
    return 1.0 if s.lower() == e.lower() else 0.0


def _trigrams(term: str) -> frozenset[str]:
    return frozenset(term[i:i + 3] for i in range(len(term) - 2))


@lru_cache(maxsize=1 << 18)
def term_similarity(s: str, e: str) -> float:
    """1.0 on case-insensitive equality, else the Dice coefficient of character trigrams."""
    a, b = s.lower(), e.lower()
    if a == b:
        return 1.0
    ta, tb = _trigrams(a), _trigrams(b)
    if not ta or not tb:
        return 0.0
    return 2 * len(ta & tb) / (len(ta) + len(tb))


SIMILARITIES: dict[str, Similarity] = {
    "trigram": term_similarity,
    "exact": exact_similarity,
}


def get_similarity(name: str) -> Similarity:
    try:
        return SIMILARITIES[name]
    except KeyError:
        raise ValueError(f"unknown similarity {name!r}; choose from {sorted(SIMILARITIES)}") from None


def relevance(subject: Iterable[str], terms: Iterable[str], sim: Similarity = term_similarity) -> float:
    """Mean over subject terms of the best similarity to any of ``terms`` (0 if ``terms`` is empty)."""
    subject = list(subject)
    terms = list(terms)
    if not subject:
        raise ValueError("query subject is empty")
    if not terms:
        return 0.0
    return sum(max(sim(s, e) for e in terms) for s in subject) / len(subject)


def capacity(expertise: Iterable[str], subject: Iterable[str], sim: Similarity = term_similarity) -> float:
    """Capacity of an expertise set to answer a subject: 1/|Sub| * sum_s max_e sim(s, e)."""
    expertise = list(expertise)
    if not expertise:
        raise ValueError("peer expertise is empty")
    return relevance(subject, expertise, sim)
