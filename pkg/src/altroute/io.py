"""Data ingestion, synthetic graph generators, and result serialization.

Road graphs load from the DIMACS shortest-path interchange format
(``c`` comments, one ``p sp <nodes> <arcs>`` header, ``a <u> <v> <w>``
arcs, 1-based ids; optional ``v <id> <x> <y>`` coordinate files).
Results serialize as a versioned, strictly parsed JSON document, plus
DOT and GeoJSON views of the reduced structure.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .altgraph import AGEdge, AlternativeGraph
from .exceptions import (
    ArcCountMismatch,
    DocumentError,
    IdOutOfRange,
    MalformedHeader,
    MissingCoordinates,
    NegativeWeight,
)
from .graph import Path, RoadGraph
from .metrics import MetricsReport

SCHEMA = "altroute-ag-v1"
COMPARE_SCHEMA = "altroute-compare-v1"


def load_dimacs(gr_path, co_path=None, weight_name: str = "weight") -> RoadGraph:
    """Parse a DIMACS ``.gr`` file (and optional ``.co`` coordinates)."""
    node_count = None
    arc_count = None
    arcs: list[tuple[int, int, int]] = []
    with open(gr_path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("c"):
                continue
            parts = line.split()
            if parts[0] == "p":
                if node_count is not None:
                    raise MalformedHeader("repeated problem line", line=lineno)
                if len(parts) != 4 or parts[1] != "sp":
                    raise MalformedHeader(f"expected 'p sp <n> <m>', got {line!r}", line=lineno)
                try:
                    node_count, arc_count = int(parts[2]), int(parts[3])
                except ValueError:
                    raise MalformedHeader(f"non-integer sizes in {line!r}", line=lineno) from None
                if node_count < 0 or arc_count < 0:
                    raise MalformedHeader("negative sizes", line=lineno)
            elif parts[0] == "a":
                if node_count is None:
                    raise MalformedHeader("arc before problem line", line=lineno)
                if len(parts) != 4:
                    raise MalformedHeader(f"expected 'a <u> <v> <w>', got {line!r}", line=lineno)
                try:
                    u, v, w = int(parts[1]), int(parts[2]), int(parts[3])
                except ValueError:
                    raise MalformedHeader(f"non-integer arc in {line!r}", line=lineno) from None
                if w < 0:
                    raise NegativeWeight(f"arc {u}->{v} has weight {w}", line=lineno)
                for node in (u, v):
                    if not (1 <= node <= node_count):
                        raise IdOutOfRange(
                            f"node {node} outside [1, {node_count}]", line=lineno
                        )
                if len(arcs) >= arc_count:
                    raise ArcCountMismatch(
                        f"more arcs than the declared {arc_count}", line=lineno
                    )
                arcs.append((u - 1, v - 1, w))
            else:
                raise MalformedHeader(f"unrecognized line {line!r}", line=lineno)
    if node_count is None:
        raise MalformedHeader("missing problem line", line=1)
    if len(arcs) != arc_count:
        raise ArcCountMismatch(f"header declares {arc_count} arcs, file has {len(arcs)}")
    coordinates = None
    if co_path is not None:
        coordinates = _load_coordinates(co_path, node_count)
    return RoadGraph.from_arcs(node_count, arcs, weight_name, coordinates)


def _load_coordinates(co_path, node_count: int):
    coords: dict[int, tuple[float, float]] = {}
    with open(co_path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith(("c", "p")):
                continue
            parts = line.split()
            if parts[0] != "v" or len(parts) != 4:
                raise MalformedHeader(f"expected 'v <id> <x> <y>', got {line!r}", line=lineno)
            try:
                node = int(parts[1])
                x, y = float(parts[2]), float(parts[3])
            except ValueError:
                raise MalformedHeader(f"non-numeric coordinate in {line!r}", line=lineno) from None
            if not (1 <= node <= node_count):
                raise IdOutOfRange(f"node {node} outside [1, {node_count}]", line=lineno)
            coords[node - 1] = (x, y)
    missing = node_count - len(coords)
    if missing:
        raise MalformedHeader(f"coordinate file misses {missing} of {node_count} nodes")
    return [coords[i] for i in range(node_count)]


def write_dimacs(graph: RoadGraph, gr_path, co_path=None) -> None:
    """Write the main weight function as a DIMACS ``.gr`` (and optional ``.co``)."""
    w = graph.weight_function()
    with open(gr_path, "w", encoding="utf-8") as fh:
        fh.write(f"p sp {graph.node_count} {graph.edge_count}\n")
        for e in range(graph.edge_count):
            u, v = graph.endpoints(e)
            fh.write(f"a {u + 1} {v + 1} {w[e]}\n")
    if co_path is not None:
        if graph.coordinates is None:
            raise MissingCoordinates("graph has no coordinates to write")
        with open(co_path, "w", encoding="utf-8") as fh:
            for i, (x, y) in enumerate(graph.coordinates):
                fh.write(f"v {i + 1} {x:g} {y:g}\n")


def generate_grid(width: int, height: int, seed: int = 0, perturb: int = 0) -> RoadGraph:
    """Bidirected grid with base weight 10 per arc, uniformly perturbed.

    Nodes are row-major, coordinates are the grid positions. The main
    weight function ``time`` is perturbed by the seeded generator; a
    constant ``dist`` function is included as a second criterion.
    """
    if width < 2 or height < 2:
        raise ValueError("grid needs width and height >= 2")
    base = 10
    if not (0 <= perturb < base):
        raise ValueError("perturb must keep weights >= 1")
    rng = random.Random(seed)
    edges: list[tuple[int, int]] = []
    time_w: list[int] = []
    dist_w: list[int] = []
    for y in range(height):
        for x in range(width):
            node = y * width + x
            for dx, dy in ((1, 0), (0, 1), (-1, 0), (0, -1)):
                nx, ny = x + dx, y + dy
                if 0 <= nx < width and 0 <= ny < height:
                    edges.append((node, ny * width + nx))
                    time_w.append(base + rng.randint(-perturb, perturb))
                    dist_w.append(base)
    coords = [(float(i % width), float(i // width)) for i in range(width * height)]
    return RoadGraph(
        width * height,
        edges,
        {"time": time_w, "dist": dist_w},
        "time",
        coords,
    )


def generate_ring(size: int, seed: int = 0, perturb: int = 0) -> RoadGraph:
    """Bidirected cycle of ``size`` nodes; two ways around by construction."""
    if size < 3:
        raise ValueError("ring needs at least 3 nodes")
    base = 10
    if not (0 <= perturb < base):
        raise ValueError("perturb must keep weights >= 1")
    rng = random.Random(seed)
    edges = []
    time_w = []
    dist_w = []
    for i in range(size):
        for j in ((i + 1) % size, (i - 1) % size):
            edges.append((i, j))
            time_w.append(base + rng.randint(-perturb, perturb))
            dist_w.append(base)
    import math

    coords = [
        (math.cos(2 * math.pi * i / size), math.sin(2 * math.pi * i / size))
        for i in range(size)
    ]
    return RoadGraph(size, edges, {"time": time_w, "dist": dist_w}, "time", coords)


def _metric_entry(value) -> dict:
    if isinstance(value, Fraction):
        return {"exact": f"{value.numerator}/{value.denominator}", "value": float(value)}
    return {"exact": None, "value": float(value)}


def report_to_json(report: MetricsReport) -> dict:
    return {
        "total_distance": _metric_entry(report.total_distance),
        "average_distance": _metric_entry(report.average_distance),
        "decision_edges": report.decision_edges,
        "variance": _metric_entry(report.variance),
        "coefficient_of_variation": report.coefficient_of_variation,
        "simple_path_count": report.simple_path_count,
        "d_g_st": report.d_g_st,
    }


_REPORT_KEYS = {
    "total_distance",
    "average_distance",
    "decision_edges",
    "variance",
    "coefficient_of_variation",
    "simple_path_count",
    "d_g_st",
}


def report_from_json(data: dict) -> MetricsReport:
    _require_keys(data, _REPORT_KEYS, "metrics")
    return MetricsReport(
        total_distance=_parse_exact(data["total_distance"], "total_distance"),
        average_distance=_parse_exact(data["average_distance"], "average_distance"),
        decision_edges=int(data["decision_edges"]),
        variance=_parse_exact(data["variance"], "variance"),
        coefficient_of_variation=float(data["coefficient_of_variation"]),
        simple_path_count=int(data["simple_path_count"]),
        d_g_st=int(data["d_g_st"]),
    )


def _parse_exact(entry, name) -> Fraction:
    if not isinstance(entry, dict) or set(entry) != {"exact", "value"}:
        raise DocumentError(f"{name}: expected an exact/value pair")
    if entry["exact"] is None:
        return Fraction(str(entry["value"]))
    num, _, den = str(entry["exact"]).partition("/")
    try:
        return Fraction(int(num), int(den or 1))
    except ValueError:
        raise DocumentError(f"{name}: bad exact rational {entry['exact']!r}") from None


def _require_keys(data: dict, keys: set[str], where: str) -> None:
    if not isinstance(data, dict):
        raise DocumentError(f"{where}: expected an object")
    extra = set(data) - keys
    if extra:
        raise DocumentError(f"{where}: unknown fields {sorted(extra)}")
    missing = keys - set(data)
    if missing:
        raise DocumentError(f"{where}: missing fields {sorted(missing)}")


@dataclass
class AGDocument:
    """Parsed alternative-graph document; round-trips losslessly."""

    source: int
    target: int
    main_weight: str
    method: str
    config: dict
    nodes: list[dict]
    edges: list[dict]
    metrics: MetricsReport

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "source": self.source,
            "target": self.target,
            "main_weight": self.main_weight,
            "method": self.method,
            "config": self.config,
            "nodes": self.nodes,
            "edges": self.edges,
            "metrics": report_to_json(self.metrics),
        }

    def to_ag(self) -> AlternativeGraph:
        """Rebuild a standalone alternative graph for recomputation.

        Underlying segments become arcs of a synthetic road graph with the
        document's node ids remapped densely.
        """
        ids = sorted({n["id"] for n in self.nodes})
        remap = {nid: i for i, nid in enumerate(ids)}
        arcs: list[tuple[int, int, int]] = []
        per_edge_arcs: list[list[int]] = []
        for edge in self.edges:
            seq = edge["nodes"]
            segs = edge["segment_weights"]
            arc_ids = []
            for (a, b), w in zip(zip(seq, seq[1:]), segs):
                arc_ids.append(len(arcs))
                arcs.append((remap[a], remap[b], int(w)))
            per_edge_arcs.append(arc_ids)
        coords = None
        if all("x" in n for n in self.nodes):
            xy = {remap[n["id"]]: (n["x"], n["y"]) for n in self.nodes}
            coords = [xy[i] for i in range(len(ids))]
        graph = RoadGraph.from_arcs(len(ids), arcs, self.main_weight, coords)
        ag_edges = []
        for edge, arc_ids in zip(self.edges, per_edge_arcs):
            path = Path.from_edges(graph, arc_ids, remap[edge["nodes"][0]], self.main_weight)
            ag_edges.append(AGEdge(remap[edge["tail"]], remap[edge["head"]], int(edge["weight"]), path))
        return AlternativeGraph(
            graph,
            remap[self.source],
            remap[self.target],
            self.main_weight,
            tuple(ag_edges),
        )

    def check(self) -> list[str]:
        """Internal consistency: segment sums, endpoints, reachability."""
        problems = []
        node_ids = {n["id"] for n in self.nodes}
        for i, edge in enumerate(self.edges):
            seq = edge["nodes"]
            if len(seq) < 2:
                problems.append(f"edge {i}: underlying sequence too short")
                continue
            if seq[0] != edge["tail"] or seq[-1] != edge["head"]:
                problems.append(f"edge {i}: underlying sequence does not match endpoints")
            if len(edge["segment_weights"]) != len(seq) - 1:
                problems.append(f"edge {i}: segment weights do not match sequence")
                continue
            if sum(edge["segment_weights"]) != edge["weight"]:
                problems.append(
                    f"edge {i}: weight {edge['weight']} != segment sum {sum(edge['segment_weights'])}"
                )
            for n in seq:
                if n not in node_ids:
                    problems.append(f"edge {i}: unknown node {n}")
        if self.source not in node_ids:
            problems.append(f"source {self.source} not in nodes")
        if self.target not in node_ids:
            problems.append(f"target {self.target} not in nodes")
        if not problems:
            try:
                for v in self.to_ag().validate():
                    problems.append(str(v))
            except (ValueError, KeyError) as exc:
                problems.append(f"structure: {exc}")
        return problems


def ag_to_document(
    ag: AlternativeGraph,
    report: MetricsReport,
    method: str,
    config: dict | None = None,
) -> AGDocument:
    """Snapshot a (reduced) alternative graph plus its metrics."""
    reduced = ag.reduce()
    w = ag.graph.weight_function(ag.main_weight)
    mentioned = set(reduced.nodes)
    for e in reduced.edges:
        mentioned.update(e.underlying.nodes)
    nodes = []
    for n in sorted(mentioned):
        entry: dict = {"id": n}
        if ag.graph.coordinates is not None:
            x, y = ag.graph.coordinates[n]
            entry["x"] = x
            entry["y"] = y
        nodes.append(entry)
    edges = []
    for e in sorted(reduced.edges, key=lambda e: e.key()):
        edges.append(
            {
                "tail": e.tail,
                "head": e.head,
                "weight": e.weight,
                "nodes": list(e.underlying.nodes),
                "segment_weights": [w[x] for x in e.underlying.edges],
            }
        )
    return AGDocument(
        source=ag.s,
        target=ag.t,
        main_weight=ag.main_weight,
        method=method,
        config=_jsonable(config or {}),
        nodes=nodes,
        edges=edges,
        metrics=report,
    )


_DOCUMENT_KEYS = {
    "schema",
    "source",
    "target",
    "main_weight",
    "method",
    "config",
    "nodes",
    "edges",
    "metrics",
}


def parse_document(data: dict) -> AGDocument:
    """Strictly parse a serialized alternative-graph document."""
    _require_keys(data, _DOCUMENT_KEYS, "document")
    if data["schema"] != SCHEMA:
        raise DocumentError(f"unsupported schema {data['schema']!r}")
    nodes = []
    for i, n in enumerate(data["nodes"]):
        keys = set(n)
        if keys not in ({"id"}, {"id", "x", "y"}):
            raise DocumentError(f"nodes[{i}]: unknown fields {sorted(keys - {'id', 'x', 'y'})}")
        nodes.append(dict(n))
    edges = []
    for i, e in enumerate(data["edges"]):
        _require_keys(e, {"tail", "head", "weight", "nodes", "segment_weights"}, f"edges[{i}]")
        edges.append(dict(e))
    return AGDocument(
        source=int(data["source"]),
        target=int(data["target"]),
        main_weight=str(data["main_weight"]),
        method=str(data["method"]),
        config=dict(data["config"]),
        nodes=nodes,
        edges=edges,
        metrics=report_from_json(data["metrics"]),
    )


def dumps_canonical(data: dict) -> str:
    """Deterministic JSON rendering used for every file this package writes."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return {"exact": f"{value.numerator}/{value.denominator}", "value": float(value)}
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return repr(value)


def export_dot(ag: AlternativeGraph) -> str:
    """DOT rendering of the reduced structure, edges labeled weight / pos span."""
    reduced = ag.reduce()
    dists = reduced.shortest_distances()
    lines = ["digraph alternatives {"]
    for n in sorted(reduced.nodes):
        shape = "doublecircle" if n in (reduced.s, reduced.t) else "circle"
        lines.append(f'  n{n} [label="{n}", shape={shape}];')
    spans = _edge_spans(reduced, dists)
    for e, (lo, hi) in zip(sorted(reduced.edges, key=lambda e: e.key()), spans):
        lines.append(
            f'  n{e.tail} -> n{e.head} [label="{e.weight} / {float(lo):.3f}..{float(hi):.3f}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _edge_spans(reduced: AlternativeGraph, dists):
    from .metrics import pos

    spans = []
    for e in sorted(reduced.edges, key=lambda e: e.key()):
        lo = pos(reduced, e.tail, dists)
        hi = pos(reduced, e.head, dists)
        if lo > hi:
            lo, hi = hi, lo
        spans.append((lo, hi))
    return spans


def export_geojson(ag: AlternativeGraph, report: MetricsReport) -> dict:
    """FeatureCollection with one LineString per reduced edge."""
    if ag.graph.coordinates is None:
        raise MissingCoordinates("geojson export needs node coordinates")
    reduced = ag.reduce()
    dists = reduced.shortest_distances()
    coords = ag.graph.coordinates
    features = []
    spans = _edge_spans(reduced, dists)
    for e, (lo, hi) in zip(sorted(reduced.edges, key=lambda e: e.key()), spans):
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[coords[n][0], coords[n][1]] for n in e.underlying.nodes],
                },
                "properties": {
                    "tail": e.tail,
                    "head": e.head,
                    "weight": e.weight,
                    "pos_lo": float(lo),
                    "pos_hi": float(hi),
                },
            }
        )
    return {
        "type": "FeatureCollection",
        "features": features,
        "metrics": report_to_json(report),
    }


def export(
    ag: AlternativeGraph,
    report: MetricsReport,
    fmt: str,
    path,
    method: str = "",
    config: dict | None = None,
) -> None:
    """Write an alternative graph in one of the supported formats."""
    if fmt == "json":
        doc = ag_to_document(ag, report, method, config)
        text = dumps_canonical(doc.to_json())
    elif fmt == "dot":
        text = export_dot(ag)
    elif fmt == "geojson":
        text = dumps_canonical(export_geojson(ag, report))
    else:
        raise ValueError(f"unknown format {fmt!r}; choose json, dot or geojson")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
