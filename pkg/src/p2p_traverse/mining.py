"""Transactional datasets and frequent closed pattern enumeration."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ._order import format_set, natural_key, set_key, sort_labels
from .errors import InputError


class UnsupportedPattern(ValueError):
    pass


@dataclass(frozen=True)
class TransactionDataset:
    """Transactions (id -> non-empty item set) over an ordered item universe.

    ``item_labels`` optionally maps item ids back to the terms they encode.
    """

    items: tuple
    transactions: Mapping[str, frozenset]
    item_labels: Mapping[str, str] = field(default_factory=dict, compare=False)

    @classmethod
    def from_transactions(cls, transactions: Mapping[str, Iterable[str]] | Iterable[tuple[str, Iterable[str]]],
                          item_labels: Mapping[str, str] | None = None) -> TransactionDataset:
        pairs = transactions.items() if isinstance(transactions, Mapping) else transactions
        tx: dict[str, frozenset] = {}
        for tid, items in pairs:
            if tid in tx:
                raise ValueError(f"duplicate transaction id {tid!r}")
            its = frozenset(items)
            if not its:
                raise ValueError(f"transaction {tid!r} is empty")
            tx[tid] = its
        universe = set().union(*tx.values()) if tx else set()
        ordered = {t: tx[t] for t in sort_labels(tx)}
        return cls(tuple(sort_labels(universe)), ordered, dict(item_labels or {}))

    def __len__(self) -> int:
        return len(self.transactions)

    def support_of(self, pattern: Iterable[str]) -> frozenset:
        p = frozenset(pattern)
        return frozenset(t for t, its in self.transactions.items() if p <= its)


@dataclass(frozen=True)
class ClosedPattern:
    pattern: frozenset
    support: frozenset
    frequency: Fraction

    def __str__(self) -> str:
        return f"{format_set(self.pattern)} | {format_set(self.support)} | {float(self.frequency):.4f}"


def closure(d: TransactionDataset, x: Iterable[str]) -> frozenset:
    """Intersection of every transaction that contains ``x``."""
    x = frozenset(x)
    unknown = x.difference(d.items)
    if unknown:
        raise UnsupportedPattern(f"items not in dataset: {sort_labels(unknown)}")
    covering = [its for its in d.transactions.values() if x <= its]
    if not covering:
        raise UnsupportedPattern(f"unsupported pattern {format_set(x)}")
    return frozenset.intersection(*covering)


def min_support_count(n_transactions: int, minfr) -> int:
    """Smallest support count whose frequency reaches ``minfr`` (exact arithmetic)."""
    fr = as_fraction(minfr)
    if not 0 < fr <= 1:
        raise ValueError(f"minfr must be in (0, 1], got {minfr}")
    return max(1, math.ceil(fr * n_transactions))


def as_fraction(value) -> Fraction:
    if isinstance(value, float):
        # Decimal text form, so 0.2 means 1/5 rather than its binary neighbour.
        return Fraction(repr(value))
    return Fraction(value)


def canonical_patterns(patterns: Iterable[ClosedPattern]) -> list[ClosedPattern]:
    return sorted(patterns, key=lambda p: set_key(p.pattern))


def frequent_closed_patterns(d: TransactionDataset, minfr) -> list[ClosedPattern]:
    """All non-empty closed patterns with frequency >= ``minfr``.

    Depth-first closure extension with the prefix-preserving test of LCM, so
    every closed pattern is generated exactly once without a duplicate table.
    """
    n = len(d)
    if n == 0:
        return []
    min_count = min_support_count(n, minfr)
    items = list(d.items)
    tids = list(d.transactions)
    bit = {t: 1 << i for i, t in enumerate(tids)}
    cover = [0] * len(items)
    for t, its in d.transactions.items():
        for i, item in enumerate(items):
            if item in its:
                cover[i] |= bit[t]
    all_tids = (1 << n) - 1

    def close(mask: int) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(cover) if c & mask == mask)

    def decode(mask: int) -> frozenset:
        return frozenset(t for t in tids if mask & bit[t])

    out: list[ClosedPattern] = []

    def emit(pat: frozenset[int], mask: int) -> None:
        if pat:
            out.append(ClosedPattern(frozenset(items[i] for i in pat), decode(mask),
                                     Fraction(mask.bit_count(), n)))

    def expand(pat: frozenset[int], mask: int, core: int) -> None:
        for i in range(core + 1, len(items)):
            if i in pat:
                continue
            new_mask = mask & cover[i]
            if new_mask.bit_count() < min_count:
                continue
            new_pat = close(new_mask)
            # Prefix-preserving: the closure may not add any item before i.
            if any(j < i and j not in pat for j in new_pat):
                continue
            emit(new_pat, new_mask)
            expand(new_pat, new_mask, i)

    root = close(all_tids)
    emit(root, all_tids)
    expand(root, all_tids, -1)
    return canonical_patterns(out)


def closed_patterns_bruteforce(d: TransactionDataset, minfr) -> list[ClosedPattern]:
    """Reference enumeration over every subset of the item universe."""
    n = len(d)
    if n == 0:
        return []
    min_count = min_support_count(n, minfr)
    items = list(d.items)
    if len(items) > 20:
        raise ValueError("brute-force enumeration limited to 20 items")
    found = {}
    for mask in range(1, 1 << len(items)):
        pat = frozenset(items[i] for i in range(len(items)) if mask >> i & 1)
        support = d.support_of(pat)
        if len(support) < min_count:
            continue
        if frozenset.intersection(*(d.transactions[t] for t in support)) == pat:
            found[pat] = ClosedPattern(pat, support, Fraction(len(support), n))
    return canonical_patterns(found.values())


def read_dataset(path: str | Path) -> TransactionDataset:
    """Parse ``<transaction-id>: <item> <item> ...`` lines; ``#`` comments."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(path, None, str(exc)) from exc
    tx: dict[str, frozenset] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tid, sep, rest = line.partition(":")
        tid = tid.strip()
        if not sep or not tid:
            raise InputError(path, lineno, "expected '<transaction-id>: <items>'")
        items = rest.split()
        if not items:
            raise InputError(path, lineno, f"transaction {tid!r} has no items")
        if tid in tx:
            raise InputError(path, lineno, f"duplicate transaction id {tid!r}")
        tx[tid] = frozenset(items)
    if not tx:
        raise InputError(path, None, "no transactions found")
    return TransactionDataset.from_transactions(tx)


def write_dataset(d: TransactionDataset) -> str:
    lines = []
    for tid, its in d.transactions.items():
        lines.append(f"{tid}: " + " ".join(sorted(its, key=natural_key)))
    return "\n".join(lines) + "\n"
