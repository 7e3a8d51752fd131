"""The alternative-graph structure: a compact union of s-t routes.

An :class:`AlternativeGraph` collects several source->target paths of a
road graph into one small graph. Validity means every node and every edge
lies on some s-t walk inside the structure, and every edge's weight equals
the weight of the underlying road path it represents. Reduction contracts
interior chain nodes (one incoming, one outgoing edge) so only split and
join points remain; all quality metrics are invariant under reduction.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from heapq import heappop, heappush
from typing import Iterable, Sequence

from .exceptions import InvalidPath, MixedEndpoints
from .graph import Path, RoadGraph

UNREACHABLE = float("inf")


@dataclass(frozen=True)
class AGEdge:
    """One edge of an alternative graph, backed by a road-graph path."""

    tail: int
    head: int
    weight: int
    underlying: Path

    def key(self) -> tuple:
        return (self.tail, self.head, self.underlying.edges)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class AlternativeGraph:
    """Union of s-t paths over a shared road graph.

    ``source_paths`` records the paths the structure was built from (under
    the main weight function); selection uses them for per-path stretch
    feasibility. Value object: build once, share freely.
    """

    graph: RoadGraph
    s: int
    t: int
    main_weight: str
    edges: tuple[AGEdge, ...]
    source_paths: tuple[Path, ...] = ()

    @property
    def nodes(self) -> frozenset[int]:
        ns = {self.s, self.t}
        for e in self.edges:
            ns.add(e.tail)
            ns.add(e.head)
        return frozenset(ns)

    def road_edges(self) -> set[int]:
        """All road-graph edge ids used by underlying paths."""
        used: set[int] = set()
        for e in self.edges:
            used.update(e.underlying.edges)
        return used

    def out_edges(self, node: int) -> list[AGEdge]:
        return [e for e in self.edges if e.tail == node]

    def in_edges(self, node: int) -> list[AGEdge]:
        return [e for e in self.edges if e.head == node]

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlternativeGraph):
            return NotImplemented
        return (
            self.graph is other.graph
            and self.s == other.s
            and self.t == other.t
            and self.main_weight == other.main_weight
            and sorted(e.key() for e in self.edges) == sorted(e.key() for e in other.edges)
        )

    def validate(self) -> list[Violation]:
        """Diagnostic check of the structural conditions; empty means valid."""
        violations: list[Violation] = []
        for e in self.edges:
            u = e.underlying.source
            v = e.underlying.target
            if (u, v) != (e.tail, e.head):
                violations.append(
                    Violation(
                        "endpoint-mismatch",
                        f"edge {e.tail}->{e.head} backed by a {u}->{v} path",
                    )
                )
            w = graph_path_weight(self.graph, e.underlying, self.main_weight)
            if w != e.weight:
                violations.append(
                    Violation(
                        "weight-mismatch",
                        f"edge {e.tail}->{e.head} carries weight {e.weight}, underlying path weighs {w}",
                    )
                )
        reach_s = self._reachable(forward=True)
        reach_t = self._reachable(forward=False)
        for n in sorted(self.nodes):
            if n not in reach_s or n not in reach_t:
                violations.append(
                    Violation("dangling-node", f"node {n} lies on no {self.s}->{self.t} path")
                )
        for e in self.edges:
            if e.tail not in reach_s or e.head not in reach_t:
                violations.append(
                    Violation(
                        "dangling-edge",
                        f"edge {e.tail}->{e.head} lies on no {self.s}->{self.t} path",
                    )
                )
        return violations

    def _reachable(self, forward: bool) -> set[int]:
        start = self.s if forward else self.t
        adj: dict[int, list[int]] = {}
        for e in self.edges:
            a, b = (e.tail, e.head) if forward else (e.head, e.tail)
            adj.setdefault(a, []).append(b)
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    def reduce(self) -> "AlternativeGraph":
        """Contract interior nodes with exactly one incoming and one outgoing edge.

        Chains collapse into single edges whose underlying path is the
        concatenation and whose weight is the sum. Idempotent; preserves
        every quality metric exactly.
        """
        edges = list(self.edges)
        incoming: dict[int, list[int]] = {}
        outgoing: dict[int, list[int]] = {}
        for i, e in enumerate(edges):
            outgoing.setdefault(e.tail, []).append(i)
            incoming.setdefault(e.head, []).append(i)

        def degree_one(n: int) -> bool:
            return len(incoming.get(n, ())) == 1 and len(outgoing.get(n, ())) == 1

        alive = [True] * len(edges)
        for n in sorted(self.nodes):
            if n in (self.s, self.t) or not degree_one(n):
                continue
            ei = incoming[n][0]
            eo = outgoing[n][0]
            if ei == eo:
                continue  # lone self-loop; invalid anyway, leave for validate()
            a, b = edges[ei], edges[eo]
            merged = AGEdge(
                a.tail,
                b.head,
                a.weight + b.weight,
                Path(
                    a.underlying.nodes + b.underlying.nodes[1:],
                    a.underlying.edges + b.underlying.edges,
                    a.weight + b.weight,
                    self.main_weight,
                ),
            )
            edges.append(merged)
            alive.append(True)
            alive[ei] = alive[eo] = False
            mi = len(edges) - 1
            incoming[n] = []
            outgoing[n] = []
            outgoing[a.tail] = [i for i in outgoing[a.tail] if i != ei] + [mi]
            incoming[b.head] = [i for i in incoming[b.head] if i != eo] + [mi]
        kept = tuple(edges[i] for i in range(len(edges)) if alive[i])
        kept = tuple(sorted(kept, key=lambda e: e.key()))
        return replace(self, edges=kept)

    def count_simple_paths(self, cap: int) -> int:
        """Number of loop-free s->t paths, exact up to ``cap`` (saturating).

        Parallel edges count as distinct paths; cycles in the structure are
        simply never entered twice.
        """
        if cap < 1:
            raise ValueError("cap must be >= 1")
        if self.s == self.t:
            return 0
        adj: dict[int, list[int]] = {}
        for e in self.edges:
            adj.setdefault(e.tail, []).append(e.head)
        count = 0
        stack: list[tuple[int, int]] = [(self.s, 0)]
        visited = {self.s}
        while stack:
            u, i = stack[-1]
            heads = adj.get(u, ())
            if i >= len(heads):
                stack.pop()
                visited.discard(u)
                continue
            stack[-1] = (u, i + 1)
            v = heads[i]
            if v == self.t:
                count += 1
                if count >= cap:
                    return cap
            elif v not in visited:
                visited.add(v)
                stack.append((v, 0))
        return count

    def shortest_distances(self) -> tuple[dict[int, object], dict[int, object]]:
        """(distance from s, distance to t) inside the structure, per node."""
        return (_ag_dijkstra(self, from_source=True), _ag_dijkstra(self, from_source=False))


def _ag_dijkstra(ag: AlternativeGraph, from_source: bool) -> dict[int, object]:
    adj: dict[int, list[tuple[int, int]]] = {}
    for e in ag.edges:
        a, b = (e.tail, e.head) if from_source else (e.head, e.tail)
        adj.setdefault(a, []).append((e.weight, b))
    start = ag.s if from_source else ag.t
    dist: dict[int, object] = {n: UNREACHABLE for n in ag.nodes}
    dist[start] = 0
    heap = [(0, start)]
    done: set[int] = set()
    while heap:
        d, u = heappop(heap)
        if u in done:
            continue
        done.add(u)
        for w, v in adj.get(u, ()):
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heappush(heap, (nd, v))
    return dist


def graph_path_weight(graph: RoadGraph, path: Path, weight_name: str) -> int:
    w = graph.weight_function(weight_name)
    return sum(w[e] for e in path.edges)


def ag_from_paths(
    graph: RoadGraph,
    paths: Sequence[Path],
    s: int,
    t: int,
    main_weight: str | None = None,
) -> AlternativeGraph:
    """Union the given s->t paths into an alternative graph.

    Each road edge appears once, as an atomic edge backed by itself; the
    produced structure is valid by construction. Raises
    :class:`InvalidPath` for a path that does not run s->t.
    """
    main = graph.main_weight if main_weight is None else main_weight
    w = graph.weight_function(main)
    seen: set[int] = set()
    edges: list[AGEdge] = []
    recorded: list[Path] = []
    for p in paths:
        if p.source != s or p.target != t:
            raise InvalidPath(f"path {p.source}->{p.target} does not run {s}->{t}")
        if p.weight_name != main:
            raise InvalidPath(
                f"path weighted under {p.weight_name!r}, alternative graph uses {main!r}"
            )
        for e in p.edges:
            if e not in seen:
                seen.add(e)
                u, v = graph.endpoints(e)
                edges.append(AGEdge(u, v, w[e], Path((u, v), (e,), w[e], main)))
        recorded.append(p)
    edges.sort(key=lambda e: e.key())
    # drop duplicate recorded paths, keep first occurrence
    uniq: list[Path] = []
    seen_paths: set[tuple[int, ...]] = set()
    for p in recorded:
        if p.edges not in seen_paths:
            seen_paths.add(p.edges)
            uniq.append(p)
    return AlternativeGraph(graph, s, t, main, tuple(edges), tuple(uniq))


def merge(ags: Sequence[AlternativeGraph], main_weight: str) -> AlternativeGraph:
    """Combine alternative graphs computed separately into a single one.

    The union of the underlying road edges is re-weighted under
    ``main_weight``; nodes and edges that no longer lie on any s-t walk
    are pruned until the structural conditions hold again, and the result
    is reduced. Raises :class:`MixedEndpoints` when sources or targets
    differ.
    """
    if not ags:
        raise ValueError("nothing to merge")
    first = ags[0]
    for ag in ags[1:]:
        if ag.s != first.s or ag.t != first.t:
            raise MixedEndpoints(
                f"cannot merge {ag.s}->{ag.t} into {first.s}->{first.t}"
            )
        if ag.graph is not first.graph:
            raise MixedEndpoints("alternative graphs live on different road graphs")
    graph = first.graph
    s, t = first.s, first.t
    road: set[int] = set()
    for ag in ags:
        road |= ag.road_edges()
    kept = _prune_to_valid(graph, road, s, t)
    w = graph.weight_function(main_weight)
    edges = []
    for e in sorted(kept):
        u, v = graph.endpoints(e)
        edges.append(AGEdge(u, v, w[e], Path((u, v), (e,), w[e], main_weight)))
    recorded: list[Path] = []
    seen_paths: set[tuple[int, ...]] = set()
    for ag in ags:
        for p in ag.source_paths:
            if p.edges in seen_paths or not set(p.edges) <= kept:
                continue
            seen_paths.add(p.edges)
            recorded.append(p.reweighted(graph, main_weight))
    merged = AlternativeGraph(graph, s, t, main_weight, tuple(edges), tuple(recorded))
    return merged.reduce()


def _prune_to_valid(graph: RoadGraph, road_edges: set[int], s: int, t: int) -> set[int]:
    """Largest subset of ``road_edges`` in which every edge is on an s-t walk."""
    current = set(road_edges)
    while True:
        fwd = _road_reach(graph, current, s, forward=True)
        bwd = _road_reach(graph, current, t, forward=False)
        kept = {e for e in current if graph.edge_tail(e) in fwd and graph.edge_head(e) in bwd}
        if kept == current:
            return kept
        current = kept


def _road_reach(graph: RoadGraph, edges: set[int], start: int, forward: bool) -> set[int]:
    adj: dict[int, list[int]] = {}
    for e in edges:
        u, v = graph.endpoints(e)
        if not forward:
            u, v = v, u
        adj.setdefault(u, []).append(v)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen
