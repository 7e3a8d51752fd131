from __future__ import annotations

import random
from fractions import Fraction

import pytest

from altroute import (
    NodeNotInAG,
    ObjectiveConfig,
    Path,
    RoadGraph,
    ZeroBaseDistance,
    ag_from_paths,
    average_distance,
    coefficient_of_variation,
    compute_metrics,
    decision_edges,
    evaluate,
    pos,
    total_distance,
    variance,
)

from conftest import chain_graph, diamond_graph, random_ag


def _path(graph, edges, start):
    return Path.from_edges(graph, edges, start)


def diamond_ag(w_sa=1, w_at=1, w_sb=1, w_bt=1):
    g = diamond_graph(w_sa, w_at, w_sb, w_bt)
    return ag_from_paths(g, [_path(g, [0, 1], 0), _path(g, [2, 3], 0)], 0, 3)


def three_then_one_ag():
    """Three disjoint branches over the first half, one over the second."""
    g = RoadGraph.from_arcs(
        6,
        [
            (0, 1, 5),
            (1, 4, 5),
            (0, 2, 5),
            (2, 4, 5),
            (0, 3, 5),
            (3, 4, 5),
            (4, 5, 10),
        ],
    )
    paths = [
        _path(g, [0, 1, 6], 0),
        _path(g, [2, 3, 6], 0),
        _path(g, [4, 5, 6], 0),
    ]
    return ag_from_paths(g, paths, 0, 5)


def test_pos_endpoints():
    ag = diamond_ag()
    assert pos(ag, 0) == 0
    assert pos(ag, 3) == 1


def test_pos_midpoint():
    ag = diamond_ag()
    assert pos(ag, 1) == Fraction(1, 2)


def test_pos_asymmetric_chain():
    g = chain_graph([1, 3])
    ag = ag_from_paths(g, [_path(g, [0, 1], 0)], 0, 2)
    # independent check: distances inside the structure are 1 and 3
    dist_s, dist_t = ag.shortest_distances()
    assert (dist_s[1], dist_t[1]) == (1, 3)
    assert pos(ag, 1) == Fraction(1, 4)


def test_pos_unknown_node():
    ag = diamond_ag()
    with pytest.raises(NodeNotInAG):
        pos(ag, 99)


def test_total_distance_single_path():
    g = chain_graph([4, 5, 6])
    ag = ag_from_paths(g, [_path(g, [0, 1, 2], 0)], 0, 3)
    assert total_distance(ag) == 1


@pytest.mark.parametrize("arms", [(1, 1, 1, 1), (7, 7, 7, 7), (1, 1, 5, 5)])
def test_total_distance_two_disjoint_paths_is_two(arms):
    # two fully disjoint routes give exactly 2, whatever their lengths
    ag = diamond_ag(*arms)
    assert total_distance(ag) == 2


def test_total_distance_hand_evaluated_diamond():
    ag = diamond_ag(1, 1, 2, 2)
    # each of the four edges contributes w / (d_s(tail) + w + d_t(head)) = 1/2
    assert total_distance(ag) == 2


def test_average_distance_single_shortest_path():
    g = chain_graph([4, 5])
    ag = ag_from_paths(g, [_path(g, [0, 1], 0)], 0, 2)
    assert average_distance(ag, 9) == 1


def test_average_distance_symmetric_diamond():
    ag = diamond_ag()
    assert average_distance(ag, 2) == 1


def test_average_distance_asymmetric_diamond():
    ag = diamond_ag(1, 1, 2, 2)
    assert average_distance(ag, 2) == Fraction(3, 2)


def test_average_distance_zero_base():
    ag = diamond_ag()
    with pytest.raises(ZeroBaseDistance):
        average_distance(ag, 0)


def test_decision_edges_cases():
    g = chain_graph([1, 1, 1])
    single = ag_from_paths(g, [_path(g, [0, 1, 2], 0)], 0, 3)
    assert decision_edges(single) == 0
    assert decision_edges(diamond_ag()) == 1
    # three parallel reduced edges: reduced edge count minus one
    g3 = RoadGraph.from_arcs(
        5, [(0, 1, 1), (1, 4, 1), (0, 2, 1), (2, 4, 1), (0, 3, 1), (3, 4, 1)]
    )
    three = ag_from_paths(
        g3, [_path(g3, [0, 1], 0), _path(g3, [2, 3], 0), _path(g3, [4, 5], 0)], 0, 4
    )
    assert decision_edges(three) == 2
    # a forced tail segment after the join adds one more outgoing edge
    assert decision_edges(three_then_one_ag()) == 3


def test_decision_edges_equals_reduced_edge_count_minus_one():
    for ag in (diamond_ag(), three_then_one_ag()):
        reduced = ag.reduce()
        if all(e.tail != reduced.t for e in reduced.edges):
            assert decision_edges(ag) == len(reduced.edges) - 1


def test_variance_balanced_cases_are_zero():
    assert variance(diamond_ag()) == 0
    g = chain_graph([2, 3])
    single = ag_from_paths(g, [_path(g, [0, 1], 0)], 0, 2)
    assert variance(single) == 0
    assert coefficient_of_variation(single) == 0.0


def test_variance_three_then_one():
    ag = three_then_one_ag()
    assert total_distance(ag) == 2
    assert variance(ag) == 1
    assert coefficient_of_variation(ag) == pytest.approx(0.5)


def test_variance_matches_numeric_integration(rng):
    from oracles import numeric_variance
    from altroute.io import generate_grid

    ag = three_then_one_ag()
    assert abs(float(variance(ag)) - numeric_variance(ag)) < 1e-3

    g = generate_grid(7, 7, seed=2, perturb=3)
    for _ in range(8):
        ag = random_ag(rng, g, 0, g.node_count - 1, rng.randint(2, 4))
        assert abs(float(variance(ag)) - numeric_variance(ag)) < 1e-3


def test_all_metrics_invariant_under_reduce(rng):
    from altroute.io import generate_grid

    g = generate_grid(8, 8, seed=13, perturb=3)
    d_g = None
    for _ in range(20):
        ag = random_ag(rng, g, 0, g.node_count - 1, rng.randint(2, 6))
        reduced = ag.reduce()
        assert total_distance(ag) == total_distance(reduced)
        if d_g is None:
            from altroute.metrics import base_shortest_distance

            d_g = base_shortest_distance(ag)
        assert average_distance(ag, d_g) == average_distance(reduced, d_g)
        assert decision_edges(ag) == decision_edges(reduced)
        assert variance(ag) == variance(reduced)
        assert coefficient_of_variation(ag) == coefficient_of_variation(reduced)
        assert ag.count_simple_paths(5000) == reduced.count_simple_paths(5000)


def test_disjoint_path_union_total_distance_is_k():
    # k pairwise edge-disjoint routes: total distance exactly k
    g = RoadGraph.from_arcs(
        5,
        [(0, 1, 3), (1, 4, 3), (0, 2, 4), (2, 4, 4), (0, 3, 9), (3, 4, 9)],
    )
    paths = [_path(g, [0, 1], 0), _path(g, [2, 3], 0), _path(g, [4, 5], 0)]
    ag = ag_from_paths(g, paths, 0, 4)
    assert total_distance(ag) == 3


def test_metrics_invariant_under_weight_scaling(rng):
    from altroute.io import generate_grid

    base = generate_grid(6, 6, seed=4, perturb=3)
    w = base.weight_function()
    for scale in (2, 7):
        arcs = [
            (base.edge_tail(e), base.edge_head(e), w[e] * scale)
            for e in range(base.edge_count)
        ]
        scaled = RoadGraph.from_arcs(base.node_count, arcs, "time")
        local = random.Random(99)
        ag = random_ag(local, base, 0, base.node_count - 1, 4)
        edge_sets = [p.edges for p in ag.source_paths]
        scaled_paths = [Path.from_edges(scaled, es, 0) for es in edge_sets]
        ag2 = ag_from_paths(scaled, scaled_paths, 0, scaled.node_count - 1, "time")
        assert total_distance(ag) == total_distance(ag2)
        d1 = 100
        assert average_distance(ag, d1) == average_distance(ag2, d1 * scale) * scale / scale
        assert decision_edges(ag) == decision_edges(ag2)
        assert variance(ag) == variance(ag2)
        assert coefficient_of_variation(ag) == coefficient_of_variation(ag2)


def test_evaluate_single_shortest_path():
    g = chain_graph([3, 3])
    ag = ag_from_paths(g, [_path(g, [0, 1], 0)], 0, 2)
    score, feasible, report = evaluate(ag, ObjectiveConfig(alpha=1.0))
    assert score == 0 and feasible
    assert report.total_distance == 1 and report.average_distance == 1


def test_evaluate_symmetric_diamond():
    ag = diamond_ag()
    score, feasible, report = evaluate(ag, ObjectiveConfig(alpha=1.0))
    assert score == 1 and feasible
    assert report.simple_path_count == 2


def test_evaluate_decision_edge_cap():
    # eleven parallel two-edge branches: decision_edges = 10
    arcs = []
    for i in range(11):
        mid = 1 + i
        arcs.append((0, mid, 1))
        arcs.append((mid, 12, 1))
    g = RoadGraph.from_arcs(13, arcs)
    paths = [_path(g, [2 * i, 2 * i + 1], 0) for i in range(11)]
    ag = ag_from_paths(g, paths, 0, 12)
    assert decision_edges(ag) == 10
    _, feasible_10, _ = evaluate(ag, ObjectiveConfig(max_decision_edges=10))
    _, feasible_9, _ = evaluate(ag, ObjectiveConfig(max_decision_edges=9))
    assert feasible_10 and not feasible_9


def test_evaluate_stretch_infeasibility():
    ag = diamond_ag(1, 1, 5, 5)  # second arm stretches 5x
    _, feasible, _ = evaluate(ag, ObjectiveConfig(max_stretch=0.25))
    assert not feasible
    _, feasible_loose, _ = evaluate(ag, ObjectiveConfig(max_stretch=5.0))
    assert feasible_loose


def test_evaluate_cov_cap():
    ag = three_then_one_ag()
    _, feasible, report = evaluate(ag, ObjectiveConfig(max_cov=0.4))
    assert report.coefficient_of_variation == pytest.approx(0.5)
    assert not feasible
