"""Deterministic ordering of labels such as ``SP2`` < ``SP10``."""

from __future__ import annotations

import re
from collections.abc import Iterable

_DIGITS = re.compile(r"(\d+)")


def natural_key(label) -> tuple:
    parts = _DIGITS.split(str(label))
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts if p != "")


def sort_labels(labels: Iterable) -> list:
    return sorted(labels, key=natural_key)


def set_key(members: Iterable) -> tuple:
    """Lexicographic key over the naturally sorted members of a set."""
    return tuple(natural_key(m) for m in sort_labels(members))


def format_set(members: Iterable) -> str:
    return "{" + ",".join(str(m) for m in sort_labels(members)) + "}"
