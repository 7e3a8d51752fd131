"""Candidate route generators.

Each generator emits ranked :class:`Candidate` paths from s to t for the
selection stage. All of them are deterministic: the shared search engine
breaks ties by node id and edge id, and candidate orderings include the
path itself as the final key.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heappop, heappush
from typing import Mapping, Sequence

from .exceptions import LabelCapExceeded, NoRoute
from .graph import (
    UNREACHABLE,
    Path,
    RoadGraph,
    WeightOverlay,
    _sssp,
    resolve_weights,
)


@dataclass
class Candidate:
    """A ranked s->t path; lower ``rank_key`` is better."""

    path: Path
    rank_key: int | float
    method: str
    info: dict = field(default_factory=dict)


def _reconstruct_forward(graph, parent, s, t):
    edges = []
    cur = t
    while cur != s:
        e = parent[cur]
        edges.append(e)
        cur = graph.edge_tail(e)
    edges.reverse()
    return edges


def _reconstruct_backward(graph, parent, node):
    """Edges of the tree walk node -> root of a backward search."""
    edges = []
    cur = node
    while parent[cur] != -1:
        e = parent[cur]
        edges.append(e)
        cur = graph.edge_head(e)
    return edges


def plateau_candidates(
    graph: RoadGraph,
    weights: WeightOverlay | str | None,
    s: int,
    t: int,
    max_candidates: int,
    partitions: int = 1,
) -> list[Candidate]:
    """Routes built from plateaus: common edges of the forward tree from s
    and the backward tree from t.

    Each maximal common chain is completed to an s->t path using the two
    trees and ranked by path length minus plateau length, so a plateau
    covering the whole path ranks 0 — the backward search prefers edges of
    the shortest path (then any forward-tree edge) on distance ties, which
    guarantees a rank-0 first candidate. With ``partitions`` > 1 the
    shortest path is additionally split into that many legs and plateaus
    are collected between the leg endpoints.
    """
    if partitions < 1:
        raise ValueError("partitions must be >= 1")
    w = resolve_weights(graph, weights)
    out = _plateau_between(graph, w, s, t, max_candidates)
    if partitions > 1:
        base = out[0].path
        for a, b, prefix, suffix in _split_legs(base, w, partitions):
            for cand in _plateau_between(graph, w, a, b, max_candidates):
                edges = prefix + tuple(cand.path.edges) + suffix
                nodes = _nodes_of(graph, edges, s)
                if len(set(nodes)) != len(nodes):
                    continue
                weight = sum(w[e] for e in edges)
                plateau_w = cand.info["plateau_weight"]
                path = Path(tuple(nodes), tuple(edges), weight, base.weight_name)
                out.append(
                    Candidate(
                        path,
                        weight - plateau_w,
                        "plateau",
                        {"plateau_weight": plateau_w, "plateau_span": cand.info["plateau_span"]},
                    )
                )
    best: dict[tuple, Candidate] = {}
    for cand in out:
        key = cand.path.edges
        if key not in best or (cand.rank_key, cand.path.weight) < (
            best[key].rank_key,
            best[key].path.weight,
        ):
            best[key] = cand
    ranked = sorted(
        best.values(), key=lambda c: (c.rank_key, c.path.weight, c.path.nodes, c.path.edges)
    )
    return ranked[:max_candidates]


def _nodes_of(graph, edges, start):
    nodes = [start]
    for e in edges:
        nodes.append(graph.edge_head(e))
    return nodes


def _split_legs(base: Path, w, partitions: int):
    """Cut points of the base path at weight quantiles; yields legs with
    the surrounding prefix/suffix edges."""
    prefix_w = [0]
    for e in base.edges:
        prefix_w.append(prefix_w[-1] + w[e])
    total = prefix_w[-1]
    cuts = [0]
    for j in range(1, partitions):
        goal = Fraction(j * total, partitions)
        idx = min(range(len(base.nodes)), key=lambda i: (abs(prefix_w[i] - goal), i))
        cuts.append(idx)
    cuts.append(len(base.nodes) - 1)
    cuts = sorted(set(cuts))
    for ia, ib in zip(cuts, cuts[1:]):
        if ia == ib:
            continue
        yield (
            base.nodes[ia],
            base.nodes[ib],
            base.edges[:ia],
            base.edges[ib:],
        )


def _plateau_between(graph, w, s, t, limit):
    dist_f, parent_f = _sssp(graph, w, s, "forward")
    if dist_f[t] == UNREACHABLE:
        raise NoRoute(f"no route from {s} to {t}")
    base_edges = _reconstruct_forward(graph, parent_f, s, t)
    prefer: dict[int, int] = {}
    for e in parent_f:
        if e >= 0:
            prefer[e] = 1
    for e in base_edges:
        prefer[e] = 0
    dist_b, parent_b = _sssp(graph, w, t, "backward", prefer=prefer)

    dst = graph.edge_head
    src = graph.edge_tail
    intersection = set()
    for v, e in enumerate(parent_f):
        if e >= 0 and parent_b[src(e)] == e:
            intersection.add(e)

    # decompose: each node has at most one intersection in-edge (its forward
    # parent) and one out-edge (its backward parent), so chains are simple
    out_edge = {}
    has_in = set()
    for e in intersection:
        out_edge[src(e)] = e
        has_in.add(dst(e))
    chains = []
    for start in sorted(out_edge):
        if start in has_in:
            continue
        chain = []
        cur = start
        while cur in out_edge:
            e = out_edge[cur]
            chain.append(e)
            cur = dst(e)
        end = cur
        if dist_b[end] == UNREACHABLE:
            continue
        # rank = completed path weight minus plateau weight; the plateau
        # itself cancels out, so ranking needs no path reconstruction
        rank = dist_f[start] + dist_b[end]
        chains.append((rank, start, end, chain))
    chains.sort(key=lambda c: (c[0], c[0] + _chain_weight(w, c[3]), c[1]))

    candidates = []
    seen_paths = set()
    name = graph.main_weight
    for rank, start, end, chain in chains:
        if len(candidates) >= limit:
            break
        plateau_w = _chain_weight(w, chain)
        head = _reconstruct_forward(graph, parent_f, s, start)
        tail = _reconstruct_backward(graph, parent_b, end)
        edges = tuple(head + chain + tail)
        if edges in seen_paths:
            continue
        nodes = _nodes_of(graph, edges, s)
        if len(set(nodes)) != len(nodes):
            continue  # completion looped; not a meaningful route
        seen_paths.add(edges)
        weight = dist_f[start] + plateau_w + dist_b[end]
        path = Path(tuple(nodes), edges, weight, name)
        candidates.append(
            Candidate(
                path,
                rank,
                "plateau",
                {"plateau_weight": plateau_w, "plateau_span": (start, end)},
            )
        )
    candidates.sort(key=lambda c: (c.rank_key, c.path.weight, c.path.nodes, c.path.edges))
    return candidates


def _chain_weight(w, chain):
    return sum(w[e] for e in chain)


def disjoint_candidates(
    graph: RoadGraph,
    weights: WeightOverlay | str | None,
    s: int,
    t: int,
    max_candidates: int,
) -> list[Candidate]:
    """Iterated shortest paths with all used edges removed after each round.

    Candidates are pairwise edge-disjoint and come out in nondecreasing
    length. Raises :class:`NoRoute` only when even the first path is
    missing; later disconnection just ends the iteration.
    """
    w = resolve_weights(graph, weights)
    banned: set[int] = set()
    out: list[Candidate] = []
    name = graph.main_weight
    while len(out) < max_candidates:
        dist, parent = _sssp(graph, w, s, "forward", target=t, banned_edges=banned if banned else None)
        if dist[t] == UNREACHABLE:
            if not out:
                raise NoRoute(f"no route from {s} to {t}")
            break
        edges = _reconstruct_forward(graph, parent, s, t)
        path = Path(tuple(_nodes_of(graph, edges, s)), tuple(edges), dist[t], name)
        out.append(Candidate(path, path.weight, "disjoint", {"round": len(out)}))
        banned.update(edges)
    return out


def yen_candidates(
    graph: RoadGraph,
    weights: WeightOverlay | str | None,
    s: int,
    t: int,
    k: int,
    max_stretch: float | None = None,
) -> list[Candidate]:
    """The k shortest loopless s->t paths, in nondecreasing weight order.

    Deviation search over root prefixes with spur searches run as
    goal-directed A* (exact distances to t as the heuristic stay lower
    bounds under edge bans). Paths stretching beyond
    (1 + max_stretch) * d(s, t) are discarded when the bound is given.
    Intended as a baseline at desk scale (k up to ~1000, graphs up to
    ~1e5 edges).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    w = resolve_weights(graph, weights)
    hdist, _ = _sssp(graph, w, t, "backward")
    if hdist[s] == UNREACHABLE:
        raise NoRoute(f"no route from {s} to {t}")
    d0 = hdist[s]
    bound = None if max_stretch is None else (1 + Fraction(str(max_stretch))) * d0
    name = graph.main_weight

    dist, parent = _sssp(graph, w, s, "forward", target=t, heuristic=hdist)
    first_edges = tuple(_reconstruct_forward(graph, parent, s, t))
    first_nodes = tuple(_nodes_of(graph, first_edges, s))

    accepted: list[tuple[int, tuple, tuple]] = []
    heap: list[tuple] = [(d0, first_nodes, first_edges, 0)]
    pushed = {first_edges}
    while heap and len(accepted) < k:
        weight, nodes, edges, dev = heappop(heap)
        accepted.append((weight, nodes, edges))
        if len(accepted) == k:
            break
        prefix_w = [0]
        for e in edges:
            prefix_w.append(prefix_w[-1] + w[e])
        for i in range(dev, len(edges)):
            spur = nodes[i]
            root_edges = edges[:i]
            root_w = prefix_w[i]
            if bound is not None and root_w + hdist[spur] > bound:
                break
            banned_edges = {
                pe[i]
                for _, _, pe in accepted
                if len(pe) > i and pe[:i] == root_edges
            }
            banned_nodes = set(nodes[:i])
            cutoff = None if bound is None else bound - root_w
            sdist, sparent = _sssp(
                graph,
                w,
                spur,
                "forward",
                target=t,
                banned_edges=banned_edges,
                banned_nodes=banned_nodes,
                heuristic=hdist,
                cutoff=cutoff,
            )
            if sdist[t] == UNREACHABLE:
                continue
            spur_edges = tuple(_reconstruct_forward(graph, sparent, spur, t))
            total_edges = root_edges + spur_edges
            if total_edges in pushed:
                continue
            total_w = root_w + sdist[t]
            if bound is not None and total_w > bound:
                continue
            pushed.add(total_edges)
            total_nodes = tuple(_nodes_of(graph, total_edges, s))
            heappush(heap, (total_w, total_nodes, total_edges, i))
    return [
        Candidate(Path(nodes, edges, weight, name), weight, "yen", {"index": i})
        for i, (weight, nodes, edges) in enumerate(accepted)
    ]


@dataclass(frozen=True)
class ParetoConfig:
    """Criteria names and the two domination-tightening knobs.

    The first weight function is the route length. ``epsilon`` lets a
    shorter route dominate anything at least (1 + epsilon) times longer;
    ``gamma`` additionally lets it dominate longer routes whose other
    criteria are not sufficiently better, via
    sum(other') / sum(other) > length / (gamma * length'). ``None`` (or
    infinity) disables a rule.
    """

    weight_names: tuple[str, ...]
    epsilon: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        if len(self.weight_names) < 2:
            raise ValueError("need at least two weight functions")
        for name, value in (("epsilon", self.epsilon), ("gamma", self.gamma)):
            if value is not None and value != float("inf") and value <= 0:
                raise ValueError(f"{name} must be positive")


def pareto_candidates(
    graph: RoadGraph,
    s: int,
    t: int,
    cfg: ParetoConfig,
    label_cap: int = 200_000,
) -> list[Candidate]:
    """Multi-criteria search keeping mutually nondominated routes.

    Label-correcting over cost vectors with the tightened domination of
    ``cfg``; surviving labels at t decode to candidate paths ranked by
    length. Raises :class:`LabelCapExceeded` (carrying partial results)
    when more than ``label_cap`` labels get created.
    """
    costs_of = [graph.weight_function(n) for n in cfg.weight_names]
    eps = cfg.epsilon
    eps_factor = None if eps in (None, float("inf")) else 1 + Fraction(str(eps))
    gam = cfg.gamma
    gamma_f = None if gam in (None, float("inf")) else Fraction(str(gam))

    def dominates(a: tuple, b: tuple) -> bool:
        if a != b and all(x <= y for x, y in zip(a, b)):
            return True
        if eps_factor is not None and b[0] >= eps_factor * a[0]:
            return True
        if gamma_f is not None and b[0] > a[0]:
            if sum(b[1:]) * gamma_f * b[0] > a[0] * sum(a[1:]):
                return True
        return False

    parent_label: list[int] = []
    parent_edge: list[int] = []
    label_cost: list[tuple] = []
    alive: list[bool] = []
    bags: dict[int, list[int]] = {}

    def new_label(costs, node, pl, pe) -> int:
        parent_label.append(pl)
        parent_edge.append(pe)
        label_cost.append(costs)
        alive.append(True)
        return len(label_cost) - 1

    def decode(lid: int) -> Path:
        edges = []
        while parent_edge[lid] != -1:
            edges.append(parent_edge[lid])
            lid = parent_label[lid]
        edges.reverse()
        nodes = _nodes_of(graph, edges, s)
        weight = sum(costs_of[0][e] for e in edges)
        return Path(tuple(nodes), tuple(edges), weight, cfg.weight_names[0])

    def settle(node: int, costs: tuple, pl: int, pe: int):
        bag = bags.setdefault(node, [])
        for lid in bag:
            if alive[lid] and (label_cost[lid] == costs or dominates(label_cost[lid], costs)):
                return None
        for lid in bag:
            if alive[lid] and dominates(costs, label_cost[lid]):
                alive[lid] = False
        lid = new_label(costs, node, pl, pe)
        bag.append(lid)
        return lid

    def partial_candidates():
        return _decode_bag(bags.get(t, ()), alive, label_cost, decode)

    start = tuple(0 for _ in costs_of)
    root = settle(s, start, -1, -1)
    heap = [(start, s, root)]
    created = 1
    while heap:
        costs, node, lid = heappop(heap)
        if not alive[lid]:
            continue
        if node == t:
            continue  # extensions through t stay possible but never help here
        for e, v in graph.out_edges(node):
            nc = tuple(c + wf[e] for c, wf in zip(costs, costs_of))
            nl = settle(v, nc, lid, e)
            if nl is None:
                continue
            created += 1
            if created > label_cap:
                raise LabelCapExceeded(
                    f"label budget {label_cap} exhausted", partial=partial_candidates()
                )
            heappush(heap, (nc, v, nl))
    result = partial_candidates()
    if not result:
        raise NoRoute(f"no route from {s} to {t}")
    return result


def _decode_bag(bag, alive, label_cost, decode) -> list[Candidate]:
    out = []
    for lid in bag:
        if not alive[lid]:
            continue
        path = decode(lid)
        if not path.is_simple():
            continue
        out.append(Candidate(path, label_cost[lid][0], "pareto", {"costs": label_cost[lid]}))
    out.sort(key=lambda c: (c.rank_key, c.info["costs"], c.path.nodes, c.path.edges))
    return out
