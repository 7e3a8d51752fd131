from __future__ import annotations

import random

import pytest

from altroute import (
    Candidate,
    NoCandidates,
    ObjectiveConfig,
    Path,
    RoadGraph,
    ag_from_paths,
    decision_edges,
    evaluate,
    greedy_select,
    plateau_candidates,
    refine,
    shortest_path,
    yen_candidates,
)
from altroute.io import generate_grid

from conftest import diamond_graph, random_graph


def _path(graph, edges, start):
    return Path.from_edges(graph, edges, start)


def _cand(path, rank=0, method="test"):
    return Candidate(path, rank, method)


def test_greedy_single_candidate():
    g = diamond_graph(3, 3, 3, 3)
    p = shortest_path(g, None, 0, 3)
    ag = greedy_select(g, 0, 3, [_cand(p)], ObjectiveConfig(alpha=1.0))
    score, feasible, _ = evaluate(ag, ObjectiveConfig(alpha=1.0))
    assert feasible and score == 0
    assert ag.road_edges() == set(p.edges)


def test_greedy_selects_both_diamond_arms():
    g = diamond_graph(3, 3, 3, 3)
    arms = [_cand(_path(g, [0, 1], 0), 0), _cand(_path(g, [2, 3], 0), 1)]
    ag = greedy_select(g, 0, 3, arms, ObjectiveConfig(alpha=1.0))
    score, feasible, _ = evaluate(ag, ObjectiveConfig(alpha=1.0))
    assert feasible and score == 1
    assert len(ag.road_edges()) == 4


def test_greedy_empty_candidates():
    g = diamond_graph()
    with pytest.raises(NoCandidates):
        greedy_select(g, 0, 3, [], ObjectiveConfig())


def hop_family_graph():
    """Chain of 13 segments (weight 10) with a worse parallel edge on each
    of the 12 interior segments."""
    arcs = [(i, i + 1, 10) for i in range(13)]
    for j in range(1, 13):
        arcs.append((j, j + 1, 12))
    return RoadGraph.from_arcs(14, arcs)


def test_greedy_stops_at_decision_edge_cap():
    g = hop_family_graph()
    base = _path(g, list(range(13)), 0)
    candidates = [_cand(base, 0)]
    for j in range(1, 13):
        edges = list(range(13))
        edges[j] = 12 + j  # swap segment j for its parallel twin
        candidates.append(_cand(_path(g, edges, 0), j))
    cfg = ObjectiveConfig(alpha=1.0, max_decision_edges=10)
    ag = greedy_select(g, 0, 13, candidates, cfg)
    _, feasible, report = evaluate(ag, cfg)
    assert feasible
    assert report.decision_edges <= 10
    # the cap stopped selection before all twelve variants went in
    assert len(ag.source_paths) < 13


def test_greedy_output_contains_a_shortest_path_and_is_feasible():
    rng = random.Random(51)
    cfg = ObjectiveConfig()
    for _ in range(10):
        g = random_graph(rng, rng.randint(5, 11), rng.randint(4, 22))
        t = g.node_count - 1
        cands = yen_candidates(g, None, 0, t, 8, max_stretch=cfg.max_stretch)
        ag = greedy_select(g, 0, t, cands, cfg)
        _, feasible, report = evaluate(ag, cfg)
        assert feasible
        d = shortest_path(g, None, 0, t).weight
        assert min(p.weight for p in ag.source_paths) == d
        assert ag.validate() == []


def test_greedy_score_never_below_single_path_baseline():
    rng = random.Random(53)
    cfg = ObjectiveConfig()
    for _ in range(10):
        g = random_graph(rng, rng.randint(5, 10), rng.randint(4, 18))
        t = g.node_count - 1
        cands = plateau_candidates(g, None, 0, t, 10)
        ag = greedy_select(g, 0, t, cands, cfg)
        score, _, _ = evaluate(ag, cfg)
        single = ag_from_paths(g, [cands[0].path], 0, t)
        base_score, _, _ = evaluate(single, cfg)
        assert score >= base_score


# ------------------------------------------------------------------ refine


def hop_ag():
    """Two 3-segment arms plus one parallel hop edge on the first arm."""
    arcs = [
        (0, 1, 10),
        (1, 2, 10),
        (2, 3, 10),
        (0, 4, 10),
        (4, 5, 10),
        (5, 3, 10),
        (1, 2, 12),  # the hop
    ]
    g = RoadGraph.from_arcs(6, arcs)
    paths = [
        _path(g, [0, 1, 2], 0),
        _path(g, [3, 4, 5], 0),
        _path(g, [0, 6, 2], 0),
    ]
    return g, ag_from_paths(g, paths, 0, 3)


def test_refine_fixpoint_on_clean_diamond():
    g = diamond_graph(5, 5, 5, 5)
    ag = ag_from_paths(g, [_path(g, [0, 1], 0), _path(g, [2, 3], 0)], 0, 3)
    cfg = ObjectiveConfig(alpha=1.0)
    refined = refine(ag, cfg)
    assert refined == ag.reduce()
    assert refine(refined, cfg) == refined


def test_refine_removes_hop_under_decision_cap():
    g, ag = hop_ag()
    assert decision_edges(ag) == 4
    cfg = ObjectiveConfig(alpha=1.0, max_decision_edges=1)
    refined = refine(ag, cfg)
    assert decision_edges(refined) == 1
    # the hop went, both full arms stayed (score prefers dropping the hop)
    assert 6 not in refined.road_edges()
    assert refined.road_edges() == set(range(6))
    assert refined.validate() == []


def test_refine_enforces_cap_on_wide_ags():
    g = hop_family_graph()
    base = _path(g, list(range(13)), 0)
    paths = [base]
    for j in range(1, 13):
        edges = list(range(13))
        edges[j] = 12 + j
        paths.append(_path(g, edges, 0))
    ag = ag_from_paths(g, paths, 0, 13)
    # every interior node splits or joins: 25 reduced edges, 24 decisions
    assert decision_edges(ag) == 24
    cfg = ObjectiveConfig(alpha=1.0, max_decision_edges=10)
    refined = refine(ag, cfg)
    assert decision_edges(refined) <= 10
    assert refined.validate() == []


def test_refine_never_removes_last_route():
    g = diamond_graph(5, 5, 5, 5)
    single = ag_from_paths(g, [_path(g, [0, 1], 0)], 0, 3)
    cfg = ObjectiveConfig(alpha=1.0, max_decision_edges=0)
    refined = refine(single, cfg)
    assert refined.road_edges() == {0, 1}


def test_refine_is_idempotent_on_method_outputs():
    rng = random.Random(59)
    cfg = ObjectiveConfig(max_decision_edges=4)
    for seed in range(4):
        g = generate_grid(8, 8, seed=seed, perturb=3)
        t = g.node_count - 1
        cands = plateau_candidates(g, None, 0, t, 12)
        ag = greedy_select(g, 0, t, cands, cfg)
        refined = refine(ag, cfg)
        assert refine(refined, cfg) == refined
        assert refined.validate() == []
        assert decision_edges(refined) <= 4
