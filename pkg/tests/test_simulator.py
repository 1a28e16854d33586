import csv
import io
from dataclasses import replace

import pytest

from p2p_traverse.baseline import Query, cap
from p2p_traverse.errors import ConfigError
from p2p_traverse.mining import frequent_closed_patterns
from p2p_traverse.similarity import exact_similarity
from p2p_traverse.simulator import (
    AGGREGATE_HEADER,
    PER_QUERY_HEADER,
    EventLoop,
    LatencyModel,
    SweepConfig,
    WorkloadConfig,
    aggregate_csv,
    generate_network,
    generate_queries,
    generate_workload,
    ground_truth,
    per_query_csv,
    precision,
    recall,
    run_experiment,
    run_sweep,
)
from p2p_traverse.traverse import expertise_dataset

from .conftest import make_network

SMALL = WorkloadConfig(n_peers=120, n_super_peers=10, query_count=15)


class TestGroundTruth:
    def crafted(self):
        peers = {f"p{i}": ("A" if i < 5 else "B", terms) for i, terms in enumerate([
            ["rock"], ["rock", "jazz"], ["pop"], ["jazz"], ["folk", "rock"],
            ["blues"], ["rock", "blues"], ["jazz", "blues"], ["pop", "folk"], ["soul"],
        ])}
        return make_network({"A": ["music"], "B": ["music"]}, [("A", "B")], peers)

    def test_hand_listed(self):
        net = self.crafted()
        q = Query("q", "p0", {"rock", "blues"})
        # Peers holding rock or blues reach 0.5; p6 holds both.
        assert ground_truth(net, q, 0.5, exact_similarity) == {"p0", "p1", "p4", "p5", "p6", "p7"}
        assert ground_truth(net, q, 1.0, exact_similarity) == {"p6"}

    def test_extremes(self):
        net = self.crafted()
        q = Query("q", "p0", {"rock"})
        assert ground_truth(net, q, 0.0) == set(net.peers)
        top = max(cap(p, q) for p in net.peers.values())
        assert ground_truth(net, q, top + 1e-9) == frozenset()


class TestGenerator:
    def test_deterministic(self):
        assert generate_network(SMALL) == generate_network(SMALL)
        w = generate_workload(SMALL)
        assert generate_queries(SMALL, w) == generate_queries(SMALL, generate_workload(SMALL))

    def test_seed_changes_network(self):
        assert generate_network(SMALL) != generate_network(replace(SMALL, seed=2))

    def test_sizes(self):
        net = generate_network(WorkloadConfig(n_peers=300, n_super_peers=10))
        assert len(net.peers) == 300 and len(net.super_peers) == 10

    def test_connected(self):
        net = generate_network(replace(SMALL, mean_degree=0))
        seen, stack = set(), ["SP1"]
        while stack:
            sp = stack.pop()
            if sp not in seen:
                seen.add(sp)
                stack.extend(net.super_peers[sp].neighbors)
        assert seen == set(net.super_peers)

    def test_communities_exist_across_seeds(self):
        for seed in range(100):
            net = generate_network(WorkloadConfig(n_peers=300, n_super_peers=10, seed=seed))
            patterns = frequent_closed_patterns(expertise_dataset(net), 0.2)
            assert any(len(p.support) >= 2 for p in patterns), seed

    @pytest.mark.parametrize("change", [
        {"vocabulary_size": 10},
        {"n_super_peers": 400},
        {"n_peers": 0},
        {"expertise_terms_per_peer": (4, 2)},
    ])
    def test_infeasible(self, change):
        with pytest.raises(ConfigError):
            generate_network(replace(SMALL, **change))


class TestMetrics:
    @pytest.mark.parametrize("retrieved,relevant,p,r", [
        ({1, 2}, {1, 2}, 1.0, 1.0),
        ({1, 2}, {3}, 0.0, 0.0),
        (set(range(8)), set(range(6)) | {20}, 0.75, 6 / 7),
        ({1, 2, 3}, {1, 2, 3, 4, 5, 6}, 1.0, 0.5),
    ])
    def test_formulas(self, retrieved, relevant, p, r):
        assert precision(retrieved, relevant) == pytest.approx(p, abs=1e-12)
        assert recall(retrieved, relevant) == pytest.approx(r, abs=1e-12)

    def test_empty_conventions(self):
        assert precision(set(), {1}) == 1.0
        assert recall({1}, set()) == 1.0
        assert precision(set(), {1}, empty=0.0) == 0.0
        assert recall({1}, set(), empty=0.0) == 0.0


class TestExperiment:
    def test_structure(self):
        base, trav = run_experiment(WorkloadConfig(n_peers=300, n_super_peers=10, seed=1, query_count=20))
        assert base.architecture == "baseline" and trav.architecture == "traverse"
        assert len(base.per_query) == len(trav.per_query) == 20
        assert [r.query_id for r in base.per_query] == [r.query_id for r in trav.per_query]

    def test_latency_model(self):
        base, _ = run_experiment(SMALL)
        model = LatencyModel()
        for r in base.per_query:
            assert r.completed_at == pytest.approx(r.issued_at + r.latency)
        assert model.per_hop_cost == 10.0

    def test_aggregates_recount(self):
        results = run_sweep(SweepConfig(SMALL, ((120, 10),), (1, 2)))
        rows = list(csv.DictReader(io.StringIO(per_query_csv(results))))
        agg = list(csv.DictReader(io.StringIO(aggregate_csv(results))))
        assert list(rows[0]) == PER_QUERY_HEADER and list(agg[0]) == AGGREGATE_HEADER
        for a in agg:
            values = [float(r[a["metric"]]) for r in rows if r["architecture"] == a["architecture"]]
            assert int(a["count"]) == len(values) == 30
            assert float(a["total"]) == pytest.approx(sum(values), abs=1e-4)
            assert float(a["mean"]) == pytest.approx(sum(values) / len(values), abs=1e-6)

    def test_message_bounds(self):
        cfg = SMALL
        w = generate_workload(cfg)
        from p2p_traverse.traverse import TraverseRouter
        from p2p_traverse.baseline import route_baseline
        router = TraverseRouter(w.network, cfg.minfr, cfg.m)
        largest = max(len(s) for s in router.strategies)
        for q in generate_queries(cfg, w):
            t = router.route(q, cfg.theta_peer)
            assert t.messages <= largest + 1 + len(t.answers)
            b = route_baseline(w.network, q, cfg.theta_peer, cfg.theta_sp)
            home = w.network.peers[q.source].super_peer
            assert b.messages <= 1 + len(w.network.super_peers[home].neighbors) + len(b.answers)

    def test_sweep_determinism(self):
        sweep = SweepConfig(SMALL, ((120, 10), (200, 12)), (3,))
        a, b = run_sweep(sweep), run_sweep(sweep)
        assert per_query_csv(a) == per_query_csv(b)
        assert aggregate_csv(a) == aggregate_csv(b)

    def test_parallel_matches_serial(self):
        sweep = SweepConfig(SMALL, ((120, 10),), (1, 2))
        assert per_query_csv(run_sweep(sweep, jobs=2)) == per_query_csv(run_sweep(sweep))


def test_event_loop_orders_by_time():
    loop, seen = EventLoop(), []
    loop.schedule(2.0, seen.append, "b")
    loop.schedule(1.0, seen.append, "a")
    loop.schedule(2.0, seen.append, "c")
    loop.run()
    assert seen == ["a", "b", "c"]


def test_config_round_trip():
    cfg = WorkloadConfig(seed=9, latency=LatencyModel(3.0, 0.5))
    assert WorkloadConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ConfigError):
        WorkloadConfig.from_dict({"bogus": 1})
