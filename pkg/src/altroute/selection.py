"""Greedy assembly of the final alternative graph and local refinement."""
from __future__ import annotations

from fractions import Fraction

from .altgraph import AlternativeGraph, ag_from_paths
from .exceptions import NoCandidates
from .graph import Path, RoadGraph, _sssp, shortest_path
from .metrics import ObjectiveConfig, score_feasibility
from .methods import Candidate


def greedy_select(
    graph: RoadGraph,
    s: int,
    t: int,
    candidates: list[Candidate],
    cfg: ObjectiveConfig | None = None,
) -> AlternativeGraph:
    """Grow an alternative graph from candidates, one best addition at a time.

    Starts from the single shortest candidate; each round adds the
    candidate whose inclusion raises the score the most while the result
    stays feasible, and stops when no strictly positive improvement is
    left. Deterministic: additions tie-break on rank key, then path
    weight, then the path itself.
    """
    if not candidates:
        raise NoCandidates(f"no candidate paths for {s}->{t}")
    cfg = cfg or ObjectiveConfig()
    d_g = shortest_path(graph, None, s, t).weight
    pool = sorted(
        candidates, key=lambda c: (c.path.weight, c.rank_key, c.path.nodes, c.path.edges)
    )
    chosen = [pool.pop(0).path]
    current = ag_from_paths(graph, chosen, s, t)
    score, _, _ = score_feasibility(current, cfg, d_g)
    pool.sort(key=lambda c: (c.rank_key, c.path.weight, c.path.nodes, c.path.edges))
    while pool:
        best = None
        best_score = score
        for i, cand in enumerate(pool):
            trial = ag_from_paths(graph, chosen + [cand.path], s, t)
            trial_score, feasible, _ = score_feasibility(trial, cfg, d_g)
            if feasible and trial_score > best_score:
                best, best_score = i, trial_score
        if best is None:
            break
        chosen.append(pool.pop(best).path)
        current = ag_from_paths(graph, chosen, s, t)
        score = best_score
    return current


def refine(ag: AlternativeGraph, cfg: ObjectiveConfig | None = None) -> AlternativeGraph:
    """Remove branches that add little until constraints hold and no
    removal improves the score.

    A branch is one edge of the reduced form (a maximal chain between
    decision nodes). While the decision-edge cap is violated, the least
    harmful removal is applied unconditionally; afterwards only strictly
    improving removals. Never removes the last s-t route, and falls back
    to the single best recorded route if trimming somehow ends below that
    baseline. Idempotent on its own output.
    """
    cfg = cfg or ObjectiveConfig()
    graph = ag.graph
    d_g = shortest_path(graph, None, ag.s, ag.t).weight
    current = _normalize(ag)
    score, _, decisions = score_feasibility(current, cfg, d_g)
    while True:
        over_cap = decisions > cfg.max_decision_edges
        if not over_cap and len(current.edges) <= 1:
            break
        options = []
        for i, removed in enumerate(current.edges):
            kept_road = set()
            for j, e in enumerate(current.edges):
                if j != i:
                    kept_road.update(e.underlying.edges)
            trial_paths = [p for p in current.source_paths if set(p.edges) <= kept_road]
            trial = _rebuild(current, kept_road, trial_paths)
            if trial is None:
                continue
            trial_score, _, trial_decisions = score_feasibility(trial, cfg, d_g)
            options.append((trial_score, -i, trial, trial_decisions))
        if not options:
            break
        options.sort(key=lambda o: (o[0], o[1]), reverse=True)
        best_score, _, best_ag, best_decisions = options[0]
        if over_cap or best_score > score:
            current, score, decisions = best_ag, best_score, best_decisions
        else:
            break
    baseline = _single_path_fallback(current)
    if baseline is not None:
        base_score, _, _ = score_feasibility(baseline, cfg, d_g)
        if score < base_score or decisions > cfg.max_decision_edges:
            return baseline
    return current


def _normalize(ag: AlternativeGraph) -> AlternativeGraph:
    road = ag.road_edges()
    rebuilt = _rebuild(ag, road, list(ag.source_paths))
    return rebuilt if rebuilt is not None else ag.reduce()


def _rebuild(ag: AlternativeGraph, road_edges: set[int], paths: list[Path]):
    """Reduced alternative graph over the given road edges; None when the
    target becomes unreachable."""
    from .altgraph import _prune_to_valid, AGEdge  # local: shares pruning logic

    kept = _prune_to_valid(ag.graph, road_edges, ag.s, ag.t)
    if not kept and ag.s != ag.t:
        return None
    reach = _reaches(ag.graph, kept, ag.s, ag.t)
    if not reach:
        return None
    w = ag.graph.weight_function(ag.main_weight)
    edges = []
    for e in sorted(kept):
        u, v = ag.graph.endpoints(e)
        edges.append(AGEdge(u, v, w[e], Path((u, v), (e,), w[e], ag.main_weight)))
    kept_paths = tuple(p for p in paths if set(p.edges) <= kept)
    rebuilt = AlternativeGraph(
        ag.graph, ag.s, ag.t, ag.main_weight, tuple(edges), kept_paths
    )
    return rebuilt.reduce()


def _reaches(graph: RoadGraph, edges: set[int], s: int, t: int) -> bool:
    adj: dict[int, list[int]] = {}
    for e in edges:
        u, v = graph.endpoints(e)
        adj.setdefault(u, []).append(v)
    seen = {s}
    stack = [s]
    while stack:
        u = stack.pop()
        if u == t:
            return True
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return s == t


def _single_path_fallback(ag: AlternativeGraph):
    """Best single recorded route, or the shortest route inside the graph."""
    if ag.source_paths:
        best = min(ag.source_paths, key=lambda p: (p.weight, p.nodes, p.edges))
        return ag_from_paths(ag.graph, [best], ag.s, ag.t).reduce()
    allowed = ag.road_edges()
    if not allowed:
        return None
    banned = set(range(ag.graph.edge_count)) - allowed
    w = ag.graph.weight_function(ag.main_weight)
    dist, parent = _sssp(ag.graph, w, ag.s, "forward", target=ag.t, banned_edges=banned)
    if dist[ag.t] == float("inf"):
        return None
    edges = []
    cur = ag.t
    while cur != ag.s:
        e = parent[cur]
        edges.append(e)
        cur = ag.graph.edge_tail(e)
    edges.reverse()
    best = Path.from_edges(ag.graph, edges, ag.s, weight_name=ag.main_weight)
    return ag_from_paths(ag.graph, [best], ag.s, ag.t).reduce()
