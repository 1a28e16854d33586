"""Seeded workload generation and baseline-vs-traverse experiments.

A run generates one network and one query stream from the configured seed,
then replays the same stream through both routers inside a small
discrete-event loop. Per-query latency is a cost model, not wall-clock time::

    latency = hops * per_hop_cost + cap_evaluations * per_cap_eval_cost
"""

from __future__ import annotations

import csv
import heapq
import io
import json
import random
import string
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from statistics import fmean

from ._order import sort_labels
from .baseline import Query, RoutingOutcome, cap, route_baseline
from .errors import ConfigError, InputError
from .mining import min_support_count
from .network import Network, Peer, SuperPeer, ThemeDescription
from .similarity import get_similarity
from .traverse import TraverseRouter

PER_QUERY_HEADER = ["size", "superpeers", "architecture", "query_id", "messages", "hops", "latency",
                    "precision", "recall"]
AGGREGATE_HEADER = ["size", "superpeers", "architecture", "metric", "mean", "total", "count"]
METRICS = ("messages", "hops", "latency", "precision", "recall")
ARCHITECTURES = ("baseline", "traverse")


def precision(retrieved: Iterable, relevant: Iterable, empty: float = 1.0) -> float:
    retrieved, relevant = set(retrieved), set(relevant)
    if not retrieved:
        return empty
    return len(retrieved & relevant) / len(retrieved)


def recall(retrieved: Iterable, relevant: Iterable, empty: float = 1.0) -> float:
    retrieved, relevant = set(retrieved), set(relevant)
    if not relevant:
        return empty
    return len(retrieved & relevant) / len(relevant)


def ground_truth(net: Network, q: Query, epsilon_rel: float, sim=None) -> frozenset:
    """Every peer in the network whose capacity for ``q`` reaches ``epsilon_rel``."""
    sim = sim or get_similarity("trigram")
    return frozenset(p.id for p in net.peers.values() if cap(p, q, sim) >= epsilon_rel)


@dataclass(frozen=True)
class LatencyModel:
    per_hop_cost: float = 10.0
    per_cap_eval_cost: float = 1.0

    def __call__(self, outcome: RoutingOutcome) -> float:
        return outcome.hop_depth * self.per_hop_cost + outcome.cap_evaluations * self.per_cap_eval_cost


@dataclass(frozen=True)
class WorkloadConfig:
    n_peers: int = 300
    n_super_peers: int = 10
    vocabulary_size: int = 240
    # Number of vocabulary regions; 0 sizes regions to the minimum frequent support.
    topics: int = 0
    expertise_terms_per_peer: tuple[int, int] = (3, 6)
    # Share of each foreign region a super-peer's theme also declares.
    theme_spill: float = 0.5
    spill_topics: int = 2
    cross_topic_rate: float = 0.1
    mean_degree: float = 2.5
    query_count: int = 50
    query_subject_size: tuple[int, int] = (1, 3)
    query_ttl: int = 2
    minfr: float = 0.2
    m: int = 1
    theta_peer: float = 0.5
    theta_sp: float = 0.3
    epsilon_rel: float = 0.5
    similarity: str = "trigram"
    seed: int = 1
    latency: LatencyModel = field(default_factory=LatencyModel)
    arrival_rate: float = 1.0
    empty_precision: float = 1.0
    empty_recall: float = 1.0

    @property
    def n_topics(self) -> int:
        if self.topics:
            return self.topics
        return max(1, self.n_super_peers // min_support_count(self.n_super_peers, self.minfr))

    def validate(self) -> None:
        for name in ("n_peers", "n_super_peers", "vocabulary_size", "query_count", "m", "query_ttl"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.n_super_peers > self.n_peers:
            raise ConfigError("n_super_peers must not exceed n_peers")
        lo, hi = self.expertise_terms_per_peer
        qlo, qhi = self.query_subject_size
        if not 1 <= lo <= hi or not 1 <= qlo <= qhi:
            raise ConfigError("term count ranges must satisfy 1 <= min <= max")
        if not 0 < self.minfr <= 1:
            raise ConfigError("minfr must be in (0, 1]")
        if self.n_topics > self.n_super_peers:
            raise ConfigError("more topics than super-peers")
        per_topic = self.vocabulary_size // self.n_topics
        if per_topic < max(hi, qhi) + 1:
            raise ConfigError(f"vocabulary too small: {per_topic} terms per topic for "
                              f"{max(hi, qhi)} terms per peer or query")
        if self.mean_degree < 0:
            raise ConfigError("mean_degree must be non-negative")
        get_similarity(self.similarity)

    @classmethod
    def from_dict(cls, doc: dict) -> WorkloadConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        kwargs = dict(doc)
        for key in ("expertise_terms_per_peer", "query_subject_size"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        if "latency" in kwargs:
            kwargs["latency"] = LatencyModel(**kwargs["latency"])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["expertise_terms_per_peer"] = list(self.expertise_terms_per_peer)
        doc["query_subject_size"] = list(self.query_subject_size)
        return doc


def _rng(cfg: WorkloadConfig, stream: str) -> random.Random:
    return random.Random(f"{cfg.seed}/{stream}")


def make_vocabulary(size: int, rng: random.Random) -> list[str]:
    """Distinct random lowercase words; random letters keep trigram overlap rare."""
    words: set[str] = set()
    out = []
    while len(out) < size:
        w = "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(6, 9)))
        if w not in words:
            words.add(w)
            out.append(w)
    return out


def _random_connected_graph(ids: Sequence[str], mean_degree: float, rng: random.Random) -> set[tuple[str, str]]:
    order = list(ids)
    rng.shuffle(order)
    edges = set()
    for i in range(1, len(order)):
        a, b = order[i], order[rng.randrange(i)]
        edges.add((min(a, b), max(a, b)))
    n = len(order)
    target = min(n * (n - 1) // 2, max(n - 1, round(mean_degree * n / 2)))
    pairs = [(a, b) for i, a in enumerate(order) for b in order[i + 1:]]
    rng.shuffle(pairs)
    for a, b in pairs:
        if len(edges) >= target:
            break
        edges.add((min(a, b), max(a, b)))
    return edges


@dataclass(frozen=True)
class Workload:
    network: Network
    topics: tuple[tuple[str, ...], ...]
    home_topic: dict


def generate_network(cfg: WorkloadConfig) -> Network:
    return generate_workload(cfg).network


def generate_workload(cfg: WorkloadConfig) -> Workload:
    """Build a network whose super-peers fall into vocabulary regions.

    Super-peers are dealt round-robin onto regions, so each region is served
    by several super-peers and their peers share expertise. Themes declare
    the home region plus part of ``spill_topics`` other regions, which is
    what the theme-based baseline sees. Peers draw expertise from their
    super-peer's region, occasionally one term from elsewhere.
    """
    cfg.validate()
    rng = _rng(cfg, "network")
    vocab = make_vocabulary(cfg.vocabulary_size, rng)
    k = cfg.n_topics
    per = cfg.vocabulary_size // k
    topics = tuple(tuple(vocab[i * per:(i + 1) * per]) for i in range(k))

    sp_ids = [f"SP{i}" for i in range(1, cfg.n_super_peers + 1)]
    offset = rng.randrange(k)
    home = {sp: (i + offset) % k for i, sp in enumerate(sp_ids)}
    net = Network()
    for sp in sp_ids:
        concepts = set(topics[home[sp]])
        others = [t for t in range(k) if t != home[sp]]
        for t in rng.sample(others, min(cfg.spill_topics, len(others))):
            concepts.update(rng.sample(topics[t], round(cfg.theme_spill * per)))
        net.super_peers[sp] = SuperPeer(sp, ThemeDescription(frozenset(concepts)))
    for a, b in sorted(_random_connected_graph(sp_ids, cfg.mean_degree, rng)):
        net.link(a, b)

    lo, hi = cfg.expertise_terms_per_peer
    base, extra = divmod(cfg.n_peers, cfg.n_super_peers)
    pid = 0
    for i, sp in enumerate(sp_ids):
        for _ in range(base + (1 if i < extra else 0)):
            pid += 1
            terms = set(rng.sample(topics[home[sp]], rng.randint(lo, hi)))
            if k > 1 and rng.random() < cfg.cross_topic_rate:
                other = rng.choice([t for t in range(k) if t != home[sp]])
                terms.add(rng.choice(topics[other]))
            net.add_peer(Peer(f"P{pid}", frozenset(terms), sp))
    net.validate()
    return Workload(net, topics, home)


def generate_queries(cfg: WorkloadConfig, workload: Workload) -> list[Query]:
    rng = _rng(cfg, "queries")
    peer_ids = sort_labels(workload.network.peers)
    lo, hi = cfg.query_subject_size
    out = []
    for i in range(cfg.query_count):
        source = rng.choice(peer_ids)
        topic = workload.topics[rng.randrange(len(workload.topics))]
        subject = frozenset(rng.sample(topic, rng.randint(lo, hi)))
        out.append(Query(f"{cfg.seed}:{i}", source, subject, cfg.query_ttl))
    return out


@dataclass(frozen=True)
class QueryRecord:
    query_id: str
    messages: int
    hops: int
    latency: float
    precision: float
    recall: float
    issued_at: float = 0.0
    completed_at: float = 0.0


@dataclass
class ExperimentResult:
    architecture: str
    n_peers: int
    n_super_peers: int
    per_query: list[QueryRecord] = field(default_factory=list)

    @property
    def aggregates(self) -> dict[str, dict[str, float]]:
        return aggregate(self.per_query)


def aggregate(records: Sequence[QueryRecord]) -> dict[str, dict[str, float]]:
    out = {}
    for metric in METRICS:
        values = [float(getattr(r, metric)) for r in records]
        out[metric] = {"mean": fmean(values) if values else 0.0, "total": sum(values), "count": len(values)}
    return out


class EventLoop:
    """Minimal time-ordered event queue; ties resolve by insertion order."""

    def __init__(self):
        self._heap: list = []
        self._seq = 0
        self.now = 0.0

    def schedule(self, time: float, action, *args) -> None:
        heapq.heappush(self._heap, (time, self._seq, action, args))
        self._seq += 1

    def run(self) -> None:
        while self._heap:
            self.now, _, action, args = heapq.heappop(self._heap)
            action(*args)


def run_experiment(cfg: WorkloadConfig) -> tuple[ExperimentResult, ExperimentResult]:
    workload = generate_workload(cfg)
    net = workload.network
    queries = generate_queries(cfg, workload)
    sim = get_similarity(cfg.similarity)
    traverse = TraverseRouter(net, cfg.minfr, cfg.m, sim=sim)
    routers = {
        "baseline": lambda q: route_baseline(net, q, cfg.theta_peer, cfg.theta_sp, sim),
        "traverse": lambda q: traverse.route(q, cfg.theta_peer),
    }
    relevant = {q.id: ground_truth(net, q, cfg.epsilon_rel, sim) for q in queries}
    arrivals_rng = _rng(cfg, "arrivals")
    arrivals = []
    t = 0.0
    for _ in queries:
        t += arrivals_rng.expovariate(cfg.arrival_rate)
        arrivals.append(t)

    results = {}
    for arch in ARCHITECTURES:
        loop = EventLoop()
        done: dict[str, QueryRecord] = {}

        def complete(record: QueryRecord) -> None:
            done[record.query_id] = replace(record, completed_at=loop.now)

        def issue(q: Query, issued: float, route=routers[arch]) -> None:
            outcome = route(q)
            latency = cfg.latency(outcome)
            retrieved = outcome.peers
            record = QueryRecord(q.id, outcome.messages, outcome.hop_depth, latency,
                                 precision(retrieved, relevant[q.id], cfg.empty_precision),
                                 recall(retrieved, relevant[q.id], cfg.empty_recall), issued)
            loop.schedule(loop.now + latency, complete, record)

        for q, at in zip(queries, arrivals):
            loop.schedule(at, issue, q, at)
        loop.run()
        results[arch] = ExperimentResult(arch, cfg.n_peers, cfg.n_super_peers, [done[q.id] for q in queries])
    return results["baseline"], results["traverse"]


@dataclass(frozen=True)
class SweepConfig:
    base: WorkloadConfig
    points: tuple[tuple[int, int], ...]
    seeds: tuple[int, ...]

    @classmethod
    def from_dict(cls, doc: dict) -> SweepConfig:
        if "base" not in doc:
            cfg = WorkloadConfig.from_dict(doc)
            return cls(cfg, ((cfg.n_peers, cfg.n_super_peers),), (cfg.seed,))
        extra = set(doc) - {"base", "points", "seeds"}
        if extra:
            raise ConfigError(f"unknown sweep fields: {sorted(extra)}")
        base = WorkloadConfig.from_dict(doc["base"])
        points = tuple((int(p), int(s)) for p, s in doc.get("points", [(base.n_peers, base.n_super_peers)]))
        seeds = tuple(int(s) for s in doc.get("seeds", [base.seed]))
        if not points or not seeds:
            raise ConfigError("sweep needs at least one point and one seed")
        return cls(base, points, seeds)

    def configs(self) -> list[WorkloadConfig]:
        return [replace(self.base, n_peers=p, n_super_peers=s, seed=seed)
                for p, s in self.points for seed in self.seeds]


def load_config(path: str | Path) -> SweepConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise InputError(path, None, str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise InputError(path, exc.lineno, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InputError(path, None, "config must be a JSON object")
    try:
        return SweepConfig.from_dict(doc)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise InputError(path, None, str(exc)) from exc


def _run_one(cfg: WorkloadConfig):
    return run_experiment(cfg)


def run_sweep(sweep: SweepConfig, jobs: int = 1) -> list[ExperimentResult]:
    """Run every (point, seed) pair; results merged per (point, architecture)."""
    configs = sweep.configs()
    for cfg in configs:
        cfg.validate()
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_run_one, configs))
    else:
        runs = [_run_one(cfg) for cfg in configs]
    merged: dict[tuple[int, int, str], ExperimentResult] = {}
    for cfg, pair in zip(configs, runs):
        for res in pair:
            key = (cfg.n_peers, cfg.n_super_peers, res.architecture)
            merged.setdefault(key, ExperimentResult(res.architecture, cfg.n_peers, cfg.n_super_peers))
            merged[key].per_query.extend(res.per_query)
    return [merged[k] for k in sorted(merged)]


def _num(x: float) -> str:
    return f"{x:.6f}"


def per_query_csv(results: Sequence[ExperimentResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PER_QUERY_HEADER)
    for res in results:
        for r in res.per_query:
            w.writerow([res.n_peers, res.n_super_peers, res.architecture, r.query_id, r.messages, r.hops,
                        _num(r.latency), _num(r.precision), _num(r.recall)])
    return buf.getvalue()


def aggregate_csv(results: Sequence[ExperimentResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AGGREGATE_HEADER)
    for res in results:
        for metric, agg in res.aggregates.items():
            w.writerow([res.n_peers, res.n_super_peers, res.architecture, metric,
                        _num(agg["mean"]), _num(agg["total"]), agg["count"]])
    return buf.getvalue()


def results_jsonl(results: Sequence[ExperimentResult]) -> str:
    lines = []
    for res in results:
        for r in res.per_query:
            lines.append(json.dumps({"size": res.n_peers, "superpeers": res.n_super_peers,
                                     "architecture": res.architecture, **asdict(r)}, sort_keys=True))
    return "\n".join(lines) + "\n"
