"""Command-line interface.

Subcommands: ``compute`` (run one method on a query), ``metrics``
(re-check a saved result), ``generate`` (synthetic test graphs), and
``compare`` (run several methods with a shared objective). Exit codes:
2 usage, 3 no route, 1 data errors (with line numbers where known).
Log level comes from the ALTROUTE_LOG environment variable.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path as FilePath

from .estimators import METHOD_NAMES, make_router
from .exceptions import AltRouteError, DataFormatError, NoRoute
from .graph import RoadGraph
from .io import (
    COMPARE_SCHEMA,
    dumps_canonical,
    export,
    generate_grid,
    generate_ring,
    load_dimacs,
    parse_document,
    report_to_json,
    write_dimacs,
)
from .metrics import compute_metrics, evaluate

log = logging.getLogger("altroute")

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2
EXIT_NO_ROUTE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="altroute", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", help="compute an alternative graph for one query")
    _graph_args(compute)
    _query_args(compute)
    compute.add_argument("--method", required=True, choices=METHOD_NAMES)
    _method_args(compute)
    _objective_args(compute)
    compute.add_argument("--out", required=True, help="output file")
    compute.add_argument("--format", default="json", choices=("json", "dot", "geojson"))

    metrics = sub.add_parser("metrics", help="recompute and print metrics of a saved result")
    metrics.add_argument("--ag", required=True, help="result JSON written by compute")

    generate = sub.add_parser("generate", help="write a synthetic graph as DIMACS")
    generate.add_argument("kind", choices=("grid", "ring"))
    generate.add_argument("--width", type=int, default=10)
    generate.add_argument("--height", type=int, default=10)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--perturb", type=int, default=0)
    generate.add_argument("--out", required=True, help="output .gr path (.co written alongside)")

    compare = sub.add_parser("compare", help="run several methods under one objective")
    _graph_args(compare)
    _query_args(compare)
    compare.add_argument(
        "--methods",
        default=",".join(METHOD_NAMES),
        help="comma-separated subset of: " + ",".join(METHOD_NAMES),
    )
    _method_args(compare)
    _objective_args(compare)
    compare.add_argument("--out", required=True, help="report JSON path")
    return parser


def _graph_args(p):
    p.add_argument("--graph", required=True, help="DIMACS .gr file")
    p.add_argument("--coords", help="DIMACS .co coordinate file")


def _query_args(p):
    p.add_argument("--source", type=int, required=True, help="source node (0-based)")
    p.add_argument("--target", type=int, required=True, help="target node (0-based)")


def _method_args(p):
    p.add_argument("--k", type=int, default=10, help="paths for yen")
    p.add_argument("--epsilon", type=float, default=0.25, help="pareto length-domination slack")
    p.add_argument("--gamma", type=float, default=1.0, help="pareto trade-off constant")
    p.add_argument("--label-cap", type=int, default=200_000, help="pareto label budget")
    p.add_argument("--factor", type=float, default=1.4, help="penalty multiplier per round")
    p.add_argument("--rejoin", type=float, default=0.5, help="rejoin penalty fraction")
    p.add_argument("--tube-radius", type=int, default=0, help="penalty tube radius (0 = off)")
    p.add_argument("--max-iter", type=int, default=20, help="penalty iteration cap")
    p.add_argument("--min-difference", type=float, default=0.2, help="penalty acceptance threshold")
    p.add_argument("--cov-penalty-scale", type=float, default=0.0, help="penalty balancing scale")
    p.add_argument("--seed-method", choices=METHOD_NAMES, help="seed penalty with another method")
    p.add_argument("--max-candidates", type=int, default=10, help="candidate cap per method")
    p.add_argument("--partitions", type=int, default=1, help="plateau legs (1 = off)")


def _objective_args(p):
    p.add_argument("--alpha", type=float, default=1.0, help="weight on average distance")
    p.add_argument("--max-decision-edges", type=int, default=10)
    p.add_argument("--max-stretch", type=float, default=0.25)
    p.add_argument("--max-cov", type=float, default=None)


def _router_params(args) -> dict:
    return {
        "k": args.k,
        "epsilon": args.epsilon,
        "gamma": args.gamma,
        "label_cap": args.label_cap,
        "factor": args.factor,
        "rejoin_penalty": args.rejoin,
        "tube_radius": args.tube_radius,
        "max_iterations": args.max_iter,
        "min_difference": args.min_difference,
        "cov_penalty_scale": args.cov_penalty_scale,
        "seed_method": args.seed_method,
        "max_candidates": args.max_candidates,
        "partitions": args.partitions,
        "alpha": args.alpha,
        "max_decision_edges": args.max_decision_edges,
        "max_stretch": args.max_stretch,
        "max_cov": args.max_cov,
    }


def _load_graph(args, need_two_weights: bool) -> RoadGraph:
    graph = load_dimacs(args.graph, args.coords)
    if need_two_weights and len(graph.weight_names) < 2:
        log.info("adding unit 'hops' criterion for pareto (input has one weight function)")
        graph = graph.with_weight_function("hops", [1] * graph.edge_count)
    return graph


def _cmd_compute(args) -> int:
    graph = _load_graph(args, need_two_weights=args.method == "pareto")
    router = make_router(args.method, **_router_params(args))
    router.fit(graph)
    ag = router.route(args.source, args.target)
    report = compute_metrics(ag)
    export(ag, report, args.format, args.out, method=args.method, config=router.get_params())
    log.info("wrote %s (%s)", args.out, args.format)
    return EXIT_OK


def _cmd_metrics(args) -> int:
    with open(args.ag, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    doc = parse_document(data)
    problems = doc.check()
    if not problems:
        recomputed = compute_metrics(doc.to_ag(), d_g_st=doc.metrics.d_g_st)
        for field in ("total_distance", "average_distance", "variance"):
            if getattr(recomputed, field) != getattr(doc.metrics, field):
                problems.append(
                    f"{field}: stored {getattr(doc.metrics, field)} != recomputed {getattr(recomputed, field)}"
                )
        for field in ("decision_edges", "simple_path_count"):
            if getattr(recomputed, field) != getattr(doc.metrics, field):
                problems.append(
                    f"{field}: stored {getattr(doc.metrics, field)} != recomputed {getattr(recomputed, field)}"
                )
    if problems:
        for p in problems:
            print(f"violation: {p}", file=sys.stderr)
        return EXIT_DATA
    print(dumps_canonical(report_to_json(doc.metrics)), end="")
    return EXIT_OK


def _cmd_generate(args) -> int:
    if args.kind == "grid":
        graph = generate_grid(args.width, args.height, args.seed, args.perturb)
    else:
        graph = generate_ring(args.width, args.seed, args.perturb)
    out = FilePath(args.out)
    write_dimacs(graph, out, out.with_suffix(".co"))
    log.info("wrote %s and %s", out, out.with_suffix(".co"))
    return EXIT_OK


def _cmd_compare(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHOD_NAMES]
    if unknown:
        raise DataFormatError(f"unknown methods: {unknown}")
    graph = _load_graph(args, need_two_weights="pareto" in methods)
    results = {}
    for method in methods:
        router = make_router(method, **_router_params(args))
        router.fit(graph)
        ag = router.route(args.source, args.target)
        score, feasible, report = evaluate(ag, router.objective())
        results[method] = {
            "score": {"exact": f"{score.numerator}/{score.denominator}", "value": float(score)},
            "feasible": feasible,
            "metrics": report_to_json(report),
            "reduced_edges": len(ag.reduce().edges),
        }
        log.info("%s: score=%.4f feasible=%s", method, float(score), feasible)
    payload = {
        "schema": COMPARE_SCHEMA,
        "graph": str(args.graph),
        "source": args.source,
        "target": args.target,
        "objective": {
            "alpha": args.alpha,
            "max_decision_edges": args.max_decision_edges,
            "max_stretch": args.max_stretch,
            "max_cov": args.max_cov,
        },
        "methods": results,
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(payload))
    return EXIT_OK


_COMMANDS = {
    "compute": _cmd_compute,
    "metrics": _cmd_metrics,
    "generate": _cmd_generate,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("ALTROUTE_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NoRoute as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_ROUTE
    except (AltRouteError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
