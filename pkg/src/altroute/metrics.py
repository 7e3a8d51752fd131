"""Quality metrics for alternative graphs, in exact rational arithmetic.

Distances here are always measured *inside* the alternative graph; the
base-graph shortest distance enters only as the normalizer of the average
distance. Everything except the coefficient of variation (whose square
root is generally irrational) is a :class:`fractions.Fraction`, which is
what makes "metrics are invariant under reduction" an exact statement
rather than a tolerance.

The position-distribution metrics (variance, coefficient of variation)
and the decision-edge count are evaluated on the reduced form: positions
are meaningful at split and join nodes, and interior chain nodes inherit
their branch's span. Total and average distance are invariant under
reduction by algebra, so they are computed on whatever form is given.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .altgraph import AlternativeGraph
from .exceptions import NodeNotInAG, ZeroBaseDistance
from .graph import UNREACHABLE, shortest_path


@dataclass(frozen=True)
class MetricsReport:
    """The measured attributes of one alternative graph."""

    total_distance: Fraction
    average_distance: Fraction
    decision_edges: int
    variance: Fraction
    coefficient_of_variation: float
    simple_path_count: int
    d_g_st: int


@dataclass(frozen=True)
class ObjectiveConfig:
    """Objective weights and constraint bounds for scoring and selection.

    score = total_distance - alpha * average_distance; an alternative graph
    is feasible when its decision edges stay within ``max_decision_edges``,
    every path used to build it stretches at most (1 + max_stretch) times
    the base shortest distance, and (when set) the coefficient of variation
    stays within ``max_cov``.
    """

    alpha: float = 1.0
    max_decision_edges: int = 10
    max_stretch: float = 0.25
    max_cov: float | None = None
    path_count_cap: int = 1000

    def __post_init__(self):
        if self.alpha < 0 or self.max_stretch < 0 or self.max_decision_edges < 0:
            raise ValueError("objective parameters must be nonnegative")

    @property
    def alpha_exact(self) -> Fraction:
        return Fraction(str(self.alpha))

    @property
    def stretch_factor(self) -> Fraction:
        return 1 + Fraction(str(self.max_stretch))


def _node_pos(dist_s, dist_t, n: int):
    df, db = dist_s.get(n, UNREACHABLE), dist_t.get(n, UNREACHABLE)
    if df == UNREACHABLE or db == UNREACHABLE:
        return None
    total = df + db
    if total == 0:
        return Fraction(0)
    return Fraction(df, total)


def pos(ag: AlternativeGraph, u: int, _dists=None) -> Fraction:
    """Relative position of a node on its best through-route, in [0, 1]."""
    if u not in ag.nodes:
        raise NodeNotInAG(f"node {u} not in alternative graph")
    dist_s, dist_t = _dists if _dists is not None else ag.shortest_distances()
    p = _node_pos(dist_s, dist_t, u)
    if p is None:
        raise NodeNotInAG(f"node {u} is not on any {ag.s}->{ag.t} path")
    return p


def total_distance(ag: AlternativeGraph, _dists=None) -> Fraction:
    """Amount of choice: each edge weighted against its best through-route.

    Two fully disjoint routes give exactly 2, regardless of their lengths;
    a single route gives exactly 1. Invariant under reduction.
    """
    dist_s, dist_t = _dists if _dists is not None else ag.shortest_distances()
    acc = Fraction(0)
    for e in ag.edges:
        if e.weight == 0:
            continue
        df, db = dist_s[e.tail], dist_t[e.head]
        if df == UNREACHABLE or db == UNREACHABLE:
            continue
        acc += Fraction(e.weight, df + e.weight + db)
    return acc


def average_distance(ag: AlternativeGraph, d_g_st: int, _dists=None) -> Fraction:
    """Mean route length in multiples of the base shortest distance."""
    if d_g_st == 0:
        raise ZeroBaseDistance("base shortest distance is zero")
    td = total_distance(ag, _dists)
    if td == 0:
        raise ZeroBaseDistance("alternative graph has no usable edges")
    weight_sum = sum(e.weight for e in ag.edges)
    return Fraction(weight_sum) / (d_g_st * td)


def decision_edges(ag: AlternativeGraph) -> int:
    """Extra outgoing-edge choices a traveler faces, on the reduced form.

    Equals (sum of outdegrees over all nodes except the target) - 1 in the
    reduced graph; with no edges out of the target this is the reduced
    edge count minus one.
    """
    reduced = ag.reduce()
    outdeg = sum(1 for e in reduced.edges if e.tail != reduced.t)
    return outdeg - 1


def position_profile(ag: AlternativeGraph, _reduced=None, _dists=None):
    """Piecewise-constant count of parallel branches along relative position.

    Evaluated on the reduced form. Returns (breakpoints, counts):
    ``counts[i]`` branches cover the open interval
    (breakpoints[i], breakpoints[i+1]). An edge spans the closed interval
    between its endpoints' positions (orientation-normalized); zero-width
    spans contribute nothing.
    """
    reduced = _reduced if _reduced is not None else ag.reduce()
    dist_s, dist_t = _dists if _dists is not None else reduced.shortest_distances()
    intervals: list[tuple[Fraction, Fraction]] = []
    for e in reduced.edges:
        lo = _node_pos(dist_s, dist_t, e.tail)
        hi = _node_pos(dist_s, dist_t, e.head)
        if lo is None or hi is None:
            continue
        if lo > hi:
            lo, hi = hi, lo
        intervals.append((lo, hi))
    points = sorted({Fraction(0), Fraction(1), *(p for iv in intervals for p in iv)})
    index = {p: i for i, p in enumerate(points)}
    delta = [0] * (len(points) + 1)
    for lo, hi in intervals:
        if lo == hi:
            continue
        delta[index[lo]] += 1
        delta[index[hi]] -= 1
    counts = []
    running = 0
    for i in range(len(points) - 1):
        running += delta[i]
        counts.append(running)
    return points, counts


def variance(ag: AlternativeGraph, _reduced=None) -> Fraction:
    """Spread of the number of parallel branches across relative positions.

    Integrates (total_distance - branches_at(x))^2 over x in [0, 1]
    exactly, sweeping the breakpoints of the piecewise-constant coverage
    count of the reduced form.
    """
    reduced = _reduced if _reduced is not None else ag.reduce()
    dists = reduced.shortest_distances()
    mean = total_distance(reduced, dists)
    points, counts = position_profile(reduced, reduced, dists)
    acc = Fraction(0)
    for (a, b), c in zip(zip(points, points[1:]), counts):
        acc += (mean - c) ** 2 * (b - a)
    return acc


def coefficient_of_variation(ag: AlternativeGraph, _reduced=None) -> float:
    """sqrt(variance) normalized by the mean number of parallel branches."""
    reduced = _reduced if _reduced is not None else ag.reduce()
    var = variance(reduced, reduced)
    if var == 0:
        return 0.0
    mean = total_distance(reduced)
    return math.sqrt(var) / float(mean)


def base_shortest_distance(ag: AlternativeGraph) -> int:
    """Shortest s->t distance in the road graph under the main weight."""
    return shortest_path(ag.graph, ag.main_weight, ag.s, ag.t).weight


def compute_metrics(
    ag: AlternativeGraph,
    d_g_st: int | None = None,
    path_count_cap: int = 1000,
) -> MetricsReport:
    """Evaluate every metric for one alternative graph.

    ``path_count_cap=0`` skips the (potentially expensive) path count and
    reports -1 for it; scoring and feasibility never look at it.
    """
    if d_g_st is None:
        d_g_st = base_shortest_distance(ag)
    reduced = ag.reduce()
    dists = reduced.shortest_distances()
    td = total_distance(reduced, dists)
    return MetricsReport(
        total_distance=td,
        average_distance=average_distance(reduced, d_g_st, dists),
        decision_edges=decision_edges(reduced),
        variance=variance(reduced, reduced),
        coefficient_of_variation=coefficient_of_variation(reduced, reduced),
        simple_path_count=(
            reduced.count_simple_paths(path_count_cap) if path_count_cap else -1
        ),
        d_g_st=d_g_st,
    )


def score_feasibility(
    ag: AlternativeGraph,
    cfg: ObjectiveConfig,
    d_g_st: int | None = None,
) -> tuple[Fraction, bool, int]:
    """Score and constraint check without the reporting-only metrics.

    Selection and refinement call this in their inner loops; it skips the
    path count always and the variance integral unless ``max_cov`` is set.
    Returns (score, feasible, decision_edges).
    """
    if d_g_st is None:
        d_g_st = base_shortest_distance(ag)
    reduced = ag.reduce()
    dists = reduced.shortest_distances()
    td = total_distance(reduced, dists)
    avg = average_distance(reduced, d_g_st, dists)
    decisions = decision_edges(reduced)
    score = td - cfg.alpha_exact * avg
    bound = cfg.stretch_factor * d_g_st
    feasible = decisions <= cfg.max_decision_edges
    if feasible:
        for p in ag.source_paths:
            if p.weight > bound:
                feasible = False
                break
    if feasible and cfg.max_cov is not None:
        feasible = coefficient_of_variation(reduced, reduced) <= cfg.max_cov
    return score, feasible, decisions


def evaluate(
    ag: AlternativeGraph,
    cfg: ObjectiveConfig,
    d_g_st: int | None = None,
    *,
    count_paths: bool = True,
) -> tuple[Fraction, bool, MetricsReport]:
    """Score an alternative graph and check its constraints.

    Returns (score, feasible, report). The per-path stretch constraint is
    checked against the paths recorded at construction; a structure built
    by hand with no recorded paths passes it vacuously.
    """
    report = compute_metrics(ag, d_g_st, cfg.path_count_cap if count_paths else 0)
    score = report.total_distance - cfg.alpha_exact * report.average_distance
    bound = cfg.stretch_factor * report.d_g_st
    feasible = report.decision_edges <= cfg.max_decision_edges
    if feasible:
        for p in ag.source_paths:
            if p.weight > bound:
                feasible = False
                break
    if feasible and cfg.max_cov is not None:
        feasible = report.coefficient_of_variation <= cfg.max_cov
    return score, feasible, report
