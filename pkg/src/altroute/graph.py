"""Road-network storage and single-source shortest-path machinery.

A :class:`RoadGraph` is an immutable directed graph with dense integer node
ids, one or more named integer weight functions (one designated as main),
and adjacency indexed in both directions so backward searches never
materialize a reversed graph.

All searches are deterministic: ties in the priority queue are broken by
node id, ties between equal-distance parent edges by edge id (optionally
refined by a caller-supplied preference map). Weights are nonnegative
integers; overlay factors are rationals rounded half-up at materialization,
so distance comparisons are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from heapq import heappop, heappush
from typing import Iterable, Mapping, Sequence

from .exceptions import NoRoute

UNREACHABLE = math.inf

# parent-preference class for edges not mentioned in a preference map
_PREF_DEFAULT = 1 << 30


def round_half_up(value: Fraction) -> int:
    """Round a nonnegative rational to the nearest integer, halves up."""
    num, den = value.numerator, value.denominator
    return (2 * num + den) // (2 * den)


class RoadGraph:
    """Immutable directed graph with named nonnegative integer weights.

    Safe to share across concurrent queries; construction validates all
    invariants (dense ids, nonnegative finite weights, consistent
    forward/backward adjacency).
    """

    __slots__ = (
        "node_count",
        "edge_count",
        "_src",
        "_dst",
        "_weights",
        "main_weight",
        "coordinates",
        "_fwd_index",
        "_fwd_edges",
        "_fwd_heads",
        "_bwd_index",
        "_bwd_edges",
        "_bwd_tails",
    )

    def __init__(
        self,
        node_count: int,
        edges: Sequence[tuple[int, int]],
        weights: Mapping[str, Sequence[int]],
        main_weight: str,
        coordinates: Sequence[tuple[float, float]] | None = None,
    ):
        if node_count < 0:
            raise ValueError("node_count must be nonnegative")
        if main_weight not in weights:
            raise ValueError(f"main weight function {main_weight!r} not provided")
        m = len(edges)
        src = [0] * m
        dst = [0] * m
        for e, (u, v) in enumerate(edges):
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge {e}: endpoint out of range [0, {node_count})")
            src[e] = u
            dst[e] = v
        checked: dict[str, list[int]] = {}
        for name, values in weights.items():
            values = list(values)
            if len(values) != m:
                raise ValueError(
                    f"weight function {name!r} has {len(values)} entries, expected {m}"
                )
            for e, w in enumerate(values):
                if not isinstance(w, int) or isinstance(w, bool):
                    raise ValueError(f"weight function {name!r}, edge {e}: not an integer")
                if w < 0:
                    raise ValueError(f"weight function {name!r}, edge {e}: negative weight")
            checked[name] = values
        if coordinates is not None:
            coordinates = [(float(x), float(y)) for x, y in coordinates]
            if len(coordinates) != node_count:
                raise ValueError("coordinates must cover every node")

        self.node_count = node_count
        self.edge_count = m
        self._src = src
        self._dst = dst
        self._weights = checked
        self.main_weight = main_weight
        self.coordinates = coordinates
        self._fwd_index, self._fwd_edges, self._fwd_heads = _build_csr(node_count, src, dst)
        self._bwd_index, self._bwd_edges, self._bwd_tails = _build_csr(node_count, dst, src)

    @classmethod
    def from_arcs(
        cls,
        node_count: int,
        arcs: Sequence[tuple[int, int, int]],
        weight_name: str = "weight",
        coordinates: Sequence[tuple[float, float]] | None = None,
    ) -> "RoadGraph":
        """Build a graph from (source, target, weight) triples."""
        edges = [(u, v) for u, v, _ in arcs]
        return cls(node_count, edges, {weight_name: [w for _, _, w in arcs]}, weight_name, coordinates)

    def with_weight_function(self, name: str, values: Sequence[int]) -> "RoadGraph":
        """Return a copy of this graph carrying an extra named weight function."""
        if name in self._weights:
            raise ValueError(f"weight function {name!r} already exists")
        weights = dict(self._weights)
        weights[name] = list(values)
        edges = list(zip(self._src, self._dst))
        return RoadGraph(self.node_count, edges, weights, self.main_weight, self.coordinates)

    @property
    def weight_names(self) -> tuple[str, ...]:
        return tuple(self._weights)

    def weight_function(self, name: str | None = None) -> list[int]:
        """Weight list for ``name`` (main weight function when omitted)."""
        return self._weights[self.main_weight if name is None else name]

    def endpoints(self, edge: int) -> tuple[int, int]:
        return self._src[edge], self._dst[edge]

    def edge_tail(self, edge: int) -> int:
        return self._src[edge]

    def edge_head(self, edge: int) -> int:
        return self._dst[edge]

    def out_edges(self, node: int) -> Iterable[tuple[int, int]]:
        """(edge id, head) pairs leaving ``node``."""
        lo, hi = self._fwd_index[node], self._fwd_index[node + 1]
        return zip(self._fwd_edges[lo:hi], self._fwd_heads[lo:hi])

    def in_edges(self, node: int) -> Iterable[tuple[int, int]]:
        """(edge id, tail) pairs entering ``node``."""
        lo, hi = self._bwd_index[node], self._bwd_index[node + 1]
        return zip(self._bwd_edges[lo:hi], self._bwd_tails[lo:hi])

    def __repr__(self) -> str:
        return (
            f"RoadGraph(nodes={self.node_count}, edges={self.edge_count}, "
            f"weights={list(self._weights)}, main={self.main_weight!r})"
        )


def _build_csr(n: int, tails: list[int], heads: list[int]):
    """Compressed adjacency: edge ids grouped by tail, ordered by edge id."""
    counts = [0] * (n + 1)
    for u in tails:
        counts[u + 1] += 1
    for i in range(n):
        counts[i + 1] += counts[i]
    order = sorted(range(len(tails)), key=lambda e: (tails[e], e))
    return counts, order, [heads[e] for e in order]


class WeightOverlay:
    """Sparse reweighting on top of a named base weight function.

    effective(e) = round_half_up(base(e) * multiplicative(e)) + additive(e),
    with factor 1 / amount 0 for absent entries. Factors must stay >= 1 and
    amounts >= 0, so effective weights never drop below the base weights
    (searches may then use base distances as an admissible heuristic).
    """

    __slots__ = ("base", "multiplicative", "additive", "_cache", "_cache_extra")

    def __init__(
        self,
        base: str | None = None,
        multiplicative: Mapping[int, Fraction] | None = None,
        additive: Mapping[int, int] | None = None,
    ):
        self.base = base
        self.multiplicative: dict[int, Fraction] = dict(multiplicative or {})
        self.additive: dict[int, int] = dict(additive or {})
        for e, f in self.multiplicative.items():
            if f < 1:
                raise ValueError(f"edge {e}: multiplicative factor below 1")
        for e, a in self.additive.items():
            if a < 0:
                raise ValueError(f"edge {e}: negative additive amount")
        self._cache: list[int] | None = None
        self._cache_extra = None

    def scale(self, edge: int, factor: Fraction) -> None:
        """Compound a multiplicative factor (>= 1) onto an edge."""
        if factor < 1:
            raise ValueError("factor must be >= 1")
        self.multiplicative[edge] = self.multiplicative.get(edge, Fraction(1)) * factor
        self._cache = None

    def add(self, edge: int, amount: int) -> None:
        """Accumulate a nonnegative additive amount onto an edge."""
        if amount < 0:
            raise ValueError("amount must be >= 0")
        if amount:
            self.additive[edge] = self.additive.get(edge, 0) + amount
            self._cache = None

    def effective_weights(
        self, graph: RoadGraph, extra_additive: Mapping[int, int] | None = None
    ) -> list[int]:
        """Materialized integer weights; ``extra_additive`` is transient."""
        if self._cache is not None and not extra_additive and not self._cache_extra:
            return self._cache
        base = graph.weight_function(self.base)
        w = list(base)
        for e, f in self.multiplicative.items():
            w[e] = round_half_up(base[e] * f)
        for e, a in self.additive.items():
            w[e] += a
        if extra_additive:
            for e, a in extra_additive.items():
                w[e] += a
            self._cache = None
            self._cache_extra = True
            return w
        self._cache = w
        self._cache_extra = False
        return w


def resolve_weights(graph: RoadGraph, weights: WeightOverlay | str | None) -> list[int]:
    """Integer weight list for a search: overlay, named function, or main."""
    if weights is None:
        return graph.weight_function()
    if isinstance(weights, str):
        return graph.weight_function(weights)
    return weights.effective_weights(graph)


@dataclass(frozen=True)
class Path:
    """A directed walk in a RoadGraph with its total weight.

    ``nodes`` has one more entry than ``edges``; an empty path (source ==
    target) has a single node and weight 0. ``weight`` is the sum of the
    edge weights under ``weight_name`` at construction time.
    """

    nodes: tuple[int, ...]
    edges: tuple[int, ...]
    weight: int
    weight_name: str

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def target(self) -> int:
        return self.nodes[-1]

    def is_simple(self) -> bool:
        return len(set(self.nodes)) == len(self.nodes)

    @classmethod
    def from_edges(
        cls,
        graph: RoadGraph,
        edges: Sequence[int],
        source: int,
        weight_name: str | None = None,
        weight_list: Sequence[int] | None = None,
    ) -> "Path":
        name = graph.main_weight if weight_name is None else weight_name
        w = graph.weight_function(name) if weight_list is None else weight_list
        nodes = [source]
        total = 0
        for e in edges:
            u, v = graph.endpoints(e)
            if u != nodes[-1]:
                raise ValueError(f"edge {e} does not continue the walk at node {nodes[-1]}")
            nodes.append(v)
            total += w[e]
        return cls(tuple(nodes), tuple(edges), total, name)

    def reweighted(self, graph: RoadGraph, weight_name: str) -> "Path":
        """Same walk, weight recomputed under another weight function."""
        w = graph.weight_function(weight_name)
        return Path(self.nodes, self.edges, sum(w[e] for e in self.edges), weight_name)


@dataclass
class ShortestPathTree:
    """Result of a full Dijkstra run from ``root``.

    ``dist[v]`` is the exact distance from the root (forward) or to the
    root (backward), ``UNREACHABLE`` when there is no connection.
    ``parent_edge[v]`` is -1 at the root and at unreachable nodes.
    """

    graph: RoadGraph
    root: int
    direction: str
    dist: list
    parent_edge: list[int]

    def in_tree(self, edge: int) -> bool:
        """Whether ``edge`` is a tree edge under this run's tie-breaking."""
        u, v = self.graph.endpoints(edge)
        child = v if self.direction == "forward" else u
        return self.parent_edge[child] == edge

    def tree_edges(self) -> set[int]:
        return {e for e in self.parent_edge if e >= 0}

    def path(self, node: int, weight_list: Sequence[int] | None = None, weight_name: str | None = None) -> Path:
        """Tree path root->node (forward) or node->root (backward)."""
        if self.dist[node] == UNREACHABLE:
            raise NoRoute(f"node {node} not reached from root {self.root}")
        edges: list[int] = []
        cur = node
        while cur != self.root:
            e = self.parent_edge[cur]
            edges.append(e)
            u, v = self.graph.endpoints(e)
            cur = u if self.direction == "forward" else v
        if self.direction == "forward":
            edges.reverse()
            start = self.root
        else:
            start = node
        return Path.from_edges(self.graph, edges, start, weight_name=weight_name, weight_list=weight_list)


def _sssp(
    graph: RoadGraph,
    weight_list: Sequence[int],
    root: int,
    direction: str,
    *,
    target: int = -1,
    banned_edges=None,
    banned_nodes=None,
    heuristic: Sequence | None = None,
    cutoff=None,
    prefer: Mapping[int, int] | None = None,
):
    """Deterministic Dijkstra / A* engine shared by every search.

    Returns (dist, parent_edge). With ``heuristic`` (a per-node lower bound
    that must be consistent under ``weight_list``), the queue is ordered by
    dist + heuristic, which keeps results exact while focusing the search
    toward ``target``. ``cutoff`` prunes labels whose bound exceeds it.
    """
    n = graph.node_count
    if direction == "forward":
        index, adj_edges, adj_heads = graph._fwd_index, graph._fwd_edges, graph._fwd_heads
    elif direction == "backward":
        index, adj_edges, adj_heads = graph._bwd_index, graph._bwd_edges, graph._bwd_tails
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")

    dist = [UNREACHABLE] * n
    parent = [-1] * n
    settled = bytearray(n)
    if banned_nodes and root in banned_nodes:
        return dist, parent
    dist[root] = 0
    h0 = heuristic[root] if heuristic is not None else 0
    if h0 == UNREACHABLE:
        return dist, parent
    heap = [(h0, root)]
    push = heappush
    pop = heappop
    w = weight_list
    while heap:
        _, u = pop(heap)
        if settled[u]:
            continue
        settled[u] = 1
        if u == target:
            break
        du = dist[u]
        for i in range(index[u], index[u + 1]):
            e = adj_edges[i]
            if banned_edges is not None and e in banned_edges:
                continue
            v = adj_heads[i]
            if settled[v]:
                # parents stay fixed once settled: every equal-distance
                # candidate was already seen while v was open (weights > 0),
                # and late swaps could cycle through zero-weight edges
                continue
            if banned_nodes is not None and v in banned_nodes:
                continue
            nd = du + w[e]
            dv = dist[v]
            if nd < dv:
                if heuristic is not None:
                    hv = heuristic[v]
                    if hv == UNREACHABLE:
                        continue
                    f = nd + hv
                else:
                    f = nd
                if cutoff is not None and f > cutoff:
                    continue
                dist[v] = nd
                parent[v] = e
                push(heap, (f, v))
            elif nd == dv:
                pe = parent[v]
                if prefer is None:
                    if e < pe:
                        parent[v] = e
                elif (prefer.get(e, _PREF_DEFAULT), e) < (prefer.get(pe, _PREF_DEFAULT), pe):
                    parent[v] = e
    return dist, parent


def dijkstra(
    graph: RoadGraph,
    weights: WeightOverlay | str | None,
    root: int,
    direction: str = "forward",
    *,
    prefer: Mapping[int, int] | None = None,
) -> ShortestPathTree:
    """Full shortest-path tree from ``root`` under effective weights.

    ``direction='backward'`` computes distances *to* the root over the
    backward adjacency. Unreachable nodes get ``UNREACHABLE`` distance.
    ``prefer`` maps edge ids to preference classes (lower wins) used when
    equal-distance parents tie; edge id decides within a class.
    """
    if not (0 <= root < graph.node_count):
        raise ValueError(f"root {root} out of range")
    w = resolve_weights(graph, weights)
    dist, parent = _sssp(graph, w, root, direction, prefer=prefer)
    return ShortestPathTree(graph, root, direction, dist, parent)


def shortest_path(
    graph: RoadGraph,
    weights: WeightOverlay | str | None,
    s: int,
    t: int,
) -> Path:
    """Exact shortest s->t path; raises :class:`NoRoute` when disconnected."""
    name = graph.main_weight
    if isinstance(weights, str):
        name = weights
    elif isinstance(weights, WeightOverlay) and weights.base is not None:
        name = weights.base
    if s == t:
        return Path((s,), (), 0, name)
    w = resolve_weights(graph, weights)
    dist, parent = _sssp(graph, w, s, "forward", target=t)
    if dist[t] == UNREACHABLE:
        raise NoRoute(f"no route from {s} to {t}")
    edges = []
    cur = t
    while cur != s:
        e = parent[cur]
        edges.append(e)
        cur = graph.edge_tail(e)
    edges.reverse()
    return Path.from_edges(graph, edges, s, weight_name=name, weight_list=w)


def relaxation_violations(
    graph: RoadGraph, weight_list: Sequence[int], tree: ShortestPathTree
) -> list[int]:
    """Edges violating dist(tail) + w <= dist(head) (mirrored backward)."""
    bad = []
    dist = tree.dist
    forward = tree.direction == "forward"
    for e in range(graph.edge_count):
        u, v = graph.endpoints(e)
        if not forward:
            u, v = v, u
        if dist[u] != UNREACHABLE and dist[u] + weight_list[e] < dist[v]:
            bad.append(e)
    return bad
