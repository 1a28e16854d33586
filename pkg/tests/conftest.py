from __future__ import annotations

from pathlib import Path

import pytest

from p2p_traverse.hypergraph import Hypergraph
from p2p_traverse.mining import read_dataset
from p2p_traverse.network import Network, Peer, SuperPeer, ThemeDescription
from p2p_traverse.traverse import read_communities

DATA = Path(__file__).parent / "data"

# Reference strategy lists for the five D2 communities.
TRANSVERSALS_3 = [
    {1, 2, 6}, {1, 6, 8}, {1, 6, 9}, {2, 3, 6}, {2, 4, 5}, {2, 5, 6},
    {2, 5, 7}, {3, 6, 8}, {4, 5, 8}, {5, 6, 8}, {5, 7, 8},
]
TRANSVERSALS_4 = [
    {1, 2, 4, 10}, {1, 2, 7, 10}, {1, 4, 5, 9}, {1, 4, 8, 10}, {1, 4, 9, 10},
    {1, 5, 7, 9}, {1, 7, 8, 10}, {1, 7, 9, 10}, {2, 3, 4, 10}, {2, 3, 7, 10},
    {3, 4, 8, 10}, {3, 7, 8, 10},
]


def sp_set(ids) -> frozenset:
    return frozenset(f"SP{i}" for i in ids)


@pytest.fixture
def six_vertex() -> Hypergraph:
    return Hypergraph.from_edges([{"v1", "v3", "v5"}, {"v5", "v6"}, {"v1", "v2", "v4"}])


@pytest.fixture
def d1():
    return read_dataset(DATA / "d1.txt")


@pytest.fixture
def d2_communities():
    return read_communities(DATA / "d2_communities.txt")


def make_network(super_peers: dict[str, list[str]], links: list[tuple[str, str]],
                 peers: dict[str, tuple[str, list[str]]]) -> Network:
    """super_peers: id -> theme concepts; peers: id -> (super-peer, expertise)."""
    net = Network()
    for sid, concepts in super_peers.items():
        net.super_peers[sid] = SuperPeer(sid, ThemeDescription(frozenset(concepts)))
    for a, b in links:
        net.link(a, b)
    for pid, (sp, terms) in peers.items():
        net.add_peer(Peer(pid, frozenset(terms), sp))
    net.validate()
    return net


# Acceptance reporting: one line per criterion in the terminal summary.
_CRITERIA: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    label = getattr(report, "criterion_label", None)
    if label:
        _CRITERIA.setdefault(label, []).append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker:
        report.criterion_label = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: int(s.split()[0][2:])):
        outcomes = _CRITERIA[label]
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"{status}  {label}")
