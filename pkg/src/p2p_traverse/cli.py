"""Command-line entry point.

Exit codes: 0 success, 1 runtime failure, 2 bad input (file or flags),
3 infeasible workload configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from ._order import format_set, sort_labels
from .baseline import DEFAULT_THETA_PEER, DEFAULT_THETA_SP, Query, route_baseline
from .ecclat import select_clusters
from .errors import ConfigError, InputError
from .hypergraph import (
    HypergraphError,
    format_transversal,
    min_transversals_berge,
    min_transversals_bruteforce,
    read_hypergraph,
)
from .mining import (
    ClosedPattern,
    TransactionDataset,
    closure,
    frequent_closed_patterns,
    min_support_count,
    read_dataset,
)
from .network import load_topology
from .similarity import get_similarity
from .simulator import (
    aggregate_csv,
    load_config,
    per_query_csv,
    results_jsonl,
    run_sweep,
)
from .traverse import (
    TraverseRouter,
    build_communities,
    build_strategies,
    expertise_dataset,
    format_strategies,
    parse_set,
    read_communities,
    read_strategies,
)

EXIT_RUNTIME = 1
EXIT_INPUT = 2
EXIT_CONFIG = 3


def parse_minfr(text: str) -> float:
    """Accept ``0.2`` or percent style ``20``; values above 1 are percentages."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid minfr {text!r}") from None
    if value > 1:
        value /= 100
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"minfr out of range: {text}")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text}")
    return value


def emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _is_topology(path: str) -> bool:
    p = Path(path)
    if p.suffix.lower() == ".json":
        return True
    try:
        return p.read_text().lstrip().startswith("{")
    except OSError:
        return False


def cmd_transversals(args) -> int:
    h = read_hypergraph(args.file)
    result = min_transversals_bruteforce(h) if args.oracle else min_transversals_berge(h)
    emit("".join(format_transversal(t) + "\n" for t in result), args.output)
    return 0


def cmd_mine(args) -> int:
    d = read_dataset(args.file)
    patterns = frequent_closed_patterns(d, args.minfr)
    if args.format == "jsonl":
        text = "".join(json.dumps(_pattern_record(p)) + "\n" for p in patterns)
    else:
        text = "".join(f"{p}\n" for p in patterns)
    emit(text, args.output)
    return 0


def _pattern_record(p: ClosedPattern) -> dict:
    return {"pattern": sort_labels(p.pattern), "support": sort_labels(p.support),
            "frequency": float(p.frequency)}


def _read_candidates(path: str, d: TransactionDataset, minfr: float) -> list[ClosedPattern]:
    """Re-validate patterns written by ``mine`` against the dataset."""
    out = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise InputError(path, None, str(exc)) from exc
    need = min_support_count(len(d), minfr)
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split("|")]
        pattern = parse_set(fields[0], path, lineno)
        try:
            closed = closure(d, pattern)
        except ValueError as exc:
            raise InputError(path, lineno, str(exc)) from exc
        if closed != pattern:
            raise InputError(path, lineno, "pattern is not closed in the dataset")
        support = d.support_of(pattern)
        if len(support) < need:
            raise InputError(path, lineno, "pattern is below the minfr threshold")
        out.append(ClosedPattern(pattern, support, Fraction(len(support), len(d))))
    if not out:
        raise InputError(path, None, "no candidate patterns found")
    return out


def cmd_cluster(args) -> int:
    d = read_dataset(args.file)
    if args.candidates:
        candidates = _read_candidates(args.candidates, d, args.minfr)
    else:
        candidates = frequent_closed_patterns(d, args.minfr)
    clustering = select_clusters(candidates, d, args.m, minfr=args.minfr)
    if args.format == "jsonl":
        text = "".join(json.dumps({
            "pattern": sort_labels(c.pattern), "members": sort_labels(c.members),
            "homogeneity": c.homogeneity, "concentration": c.concentration,
            "interestingness": c.interestingness}) + "\n" for c in clustering.selected)
    else:
        text = "".join(f"{c}\n" for c in clustering.selected)
        if clustering.unclassified:
            text += f"# unclassified {format_set(clustering.unclassified)}\n"
    emit(text, args.output)
    return 0


def cmd_communities(args) -> int:
    if _is_topology(args.file):
        d = expertise_dataset(load_topology(args.file))
    else:
        d = read_dataset(args.file)
    cs = build_communities(d, args.minfr, args.m)
    emit("".join(f"{c}\n" for c in cs), args.output)
    return 0


def cmd_strategies(args) -> int:
    cs = read_communities(args.file)
    emit(format_strategies(build_strategies(cs)), args.output)
    return 0


def _query(args, net) -> Query:
    terms = args.query.split()
    if not terms:
        raise InputError(None, None, "--query needs at least one term")
    if args.source not in net.peers:
        raise InputError(args.topology, None, f"unknown source peer {args.source}")
    return Query(args.query_id, args.source, frozenset(terms), args.ttl)


def cmd_route_baseline(args) -> int:
    net = load_topology(args.topology)
    q = _query(args, net)
    outcome = route_baseline(net, q, args.theta_peer, args.theta_sp, get_similarity(args.similarity))
    emit(json.dumps({"query": q.id, "architecture": "baseline", **outcome.to_record()}, sort_keys=True) + "\n",
         args.output)
    return 0


def cmd_route_traverse(args) -> int:
    net = load_topology(args.topology)
    q = _query(args, net)
    router = TraverseRouter(net, args.minfr, args.m, sim=get_similarity(args.similarity))
    if args.strategies:
        router.strategies = read_strategies(args.strategies)
    outcome = router.route(q, args.theta_peer)
    emit(json.dumps({"query": q.id, "architecture": "traverse", **outcome.to_record()}, sort_keys=True) + "\n",
         args.output)
    return 0


def _write_results(results, args) -> None:
    if args.format == "jsonl":
        emit(results_jsonl(results), args.output)
        return
    emit(per_query_csv(results), args.output)
    if args.aggregate:
        Path(args.aggregate).write_text(aggregate_csv(results))
    elif args.output:
        out = Path(args.output)
        out.with_name(out.stem + "_aggregate" + out.suffix).write_text(aggregate_csv(results))


def cmd_simulate(args) -> int:
    sweep = load_config(args.config)
    seed = sweep.seeds[0] if args.seed is None else args.seed
    sweep = replace(sweep, points=sweep.points[:1], seeds=(seed,))
    _write_results(run_sweep(sweep), args)
    return 0


def cmd_compare(args) -> int:
    if not args.output:
        raise InputError(None, None, "compare requires --output for the per-query CSV")
    sweep = load_config(args.config)
    if args.seed is not None:
        sweep = replace(sweep, seeds=(args.seed,))
    _write_results(run_sweep(sweep, jobs=args.jobs), args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="p2p-traverse",
                                     description="Hypergraph-transversal query routing for super-peer networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        p.add_argument("--output", "-o", help="write to this file instead of stdout")
        return p

    p = add("transversals", cmd_transversals, "minimal transversals of a hypergraph file")
    p.add_argument("file")
    p.add_argument("--oracle", action="store_true", help="use exhaustive enumeration instead of Berge")

    p = add("mine", cmd_mine, "frequent closed patterns of a transaction file")
    p.add_argument("file")
    p.add_argument("--minfr", type=parse_minfr, required=True)
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    p = add("cluster", cmd_cluster, "select an overlapping clustering")
    p.add_argument("file")
    p.add_argument("--minfr", type=parse_minfr, required=True)
    p.add_argument("--m", type=positive_int, default=1)
    p.add_argument("--candidates", help="patterns written by 'mine' to use as candidates")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    p = add("communities", cmd_communities, "super-peer communities from a topology or dataset")
    p.add_argument("file")
    p.add_argument("--minfr", type=parse_minfr, default=0.2)
    p.add_argument("--m", type=positive_int, default=1)

    p = add("strategies", cmd_strategies, "routing strategies from a communities file")
    p.add_argument("file")

    for name, fn in (("route-baseline", cmd_route_baseline), ("route-traverse", cmd_route_traverse)):
        p = add(name, fn, f"route one query ({name.split('-')[1]})")
        p.add_argument("topology")
        p.add_argument("--query", required=True, help="space-separated subject terms")
        p.add_argument("--source", required=True, help="id of the issuing peer")
        p.add_argument("--query-id", default="q0")
        p.add_argument("--ttl", type=positive_int, default=2)
        p.add_argument("--theta-peer", type=float, default=DEFAULT_THETA_PEER)
        p.add_argument("--similarity", choices=("trigram", "exact"), default="trigram")
        if name == "route-baseline":
            p.add_argument("--theta-sp", type=float, default=DEFAULT_THETA_SP)
        else:
            p.add_argument("--minfr", type=parse_minfr, default=0.2)
            p.add_argument("--m", type=positive_int, default=1)
            p.add_argument("--strategies", help="strategy file to use instead of computing one")

    for name, fn in (("simulate", cmd_simulate), ("compare", cmd_compare)):
        p = add(name, fn, "run one configuration" if name == "simulate" else "run a sweep of configurations")
        p.add_argument("--config", required=True)
        p.add_argument("--aggregate", help="path of the aggregate CSV")
        p.add_argument("--seed", type=int)
        p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
        if name == "compare":
            p.add_argument("--jobs", type=positive_int, default=1)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: infeasible configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InputError, HypergraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
