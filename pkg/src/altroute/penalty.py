"""Iterative penalty method.

Repeatedly: compute a shortest path under adjusted weights, keep it when
it is short enough under the *original* weights and sufficiently different
from what was kept so far, then raise the weights along the path
(multiplicative factor, optionally a decaying tube around it, an additive
penalty on edges hopping off and back onto the kept routes, and an
additive balancing term steering later searches toward thinly covered
positions). The loop stops as soon as a shortest path contains no edge
that has never been penalized — the natural saturation point — or when
the iteration cap is reached.

Penalties only ever increase weights, so exact base distances to the
target stay a valid lower bound and every inner search runs goal-directed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heappop, heappush
from typing import Callable

from .altgraph import AlternativeGraph, ag_from_paths, merge
from .exceptions import NoRoute
from .graph import (
    UNREACHABLE,
    Path,
    RoadGraph,
    WeightOverlay,
    _sssp,
    round_half_up,
)
from .metrics import position_profile, total_distance


@dataclass(frozen=True)
class PenaltyConfig:
    """Knobs of the penalty loop.

    ``factor`` multiplies the weights of each found path (sensible range
    1..2). ``rejoin_penalty`` is the additive hop suppression as a fraction
    of (factor - 1) * d(s, t); ``rejoin_grading`` optionally scales it by
    the junction's relative position. ``increase_damping`` switches the
    per-edge repeat penalty from the hard cap to geometrically shrinking
    factors. ``tube_radius`` > 0 also raises edges near the path, fading
    with weight-distance as (1 - d/radius) ** tube_decay.
    ``cov_penalty_scale`` > 0 enables the position-balancing penalty.
    Acceptance: original-weight stretch at most (1 + max_stretch), and at
    least ``min_difference`` of the path's weight on edges new to the
    result.
    """

    factor: float = 1.4
    rejoin_penalty: float = 0.5
    rejoin_grading: Callable[[float], float] | None = None
    max_increases_per_edge: int = 4
    increase_damping: float | None = None
    max_iterations: int = 20
    tube_radius: int = 0
    tube_decay: float = 1.0
    cov_penalty_scale: float = 0.0
    max_stretch: float = 0.25
    min_difference: float = 0.2

    def __post_init__(self):
        if self.factor < 1:
            raise ValueError("factor must be >= 1")
        if not (0 <= self.rejoin_penalty <= 1):
            raise ValueError("rejoin_penalty is a fraction of (factor-1)*d(s,t)")
        if self.max_increases_per_edge < 1:
            raise ValueError("max_increases_per_edge must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tube_radius < 0 or self.min_difference < 0 or self.max_stretch < 0:
            raise ValueError("bounds must be nonnegative")

    @property
    def factor_exact(self) -> Fraction:
        return Fraction(str(self.factor))


@dataclass
class PenaltyState:
    """Mutable query-local state of one penalty run."""

    graph: RoadGraph
    s: int
    t: int
    d_st: int
    overlay: WeightOverlay
    increase_count: dict[int, int] = field(default_factory=dict)
    accepted: list[Path] = field(default_factory=list)
    ag_nodes: set[int] = field(default_factory=set)
    ag_road_edges: set[int] = field(default_factory=set)
    cov_extra: dict[int, int] = field(default_factory=dict)
    iteration: int = 0

    def current_ag(self) -> AlternativeGraph:
        return ag_from_paths(self.graph, self.accepted, self.s, self.t)

    def absorb(self, path: Path) -> None:
        self.accepted.append(path)
        self.ag_nodes.update(path.nodes)
        self.ag_road_edges.update(path.edges)


def run_penalty_loop(
    graph: RoadGraph,
    s: int,
    t: int,
    cfg: PenaltyConfig | None = None,
    seed: AlternativeGraph | None = None,
) -> PenaltyState:
    """Execute the loop and return its final state (accepted paths,
    overlay, per-edge increase counts, iterations used)."""
    cfg = cfg or PenaltyConfig()
    base = graph.weight_function()
    hdist, _ = _sssp(graph, base, t, "backward")
    if hdist[s] == UNREACHABLE:
        raise NoRoute(f"no route from {s} to {t}")
    d_st = hdist[s]
    state = PenaltyState(graph, s, t, d_st, WeightOverlay())
    if seed is not None:
        if seed.s != s or seed.t != t or seed.graph is not graph:
            raise ValueError("seed must share the query's graph and endpoints")
        state.ag_nodes.update(seed.nodes)
        for e in sorted(seed.road_edges()):
            state.ag_road_edges.add(e)
            _bump_edge(state, e, cfg)

    stretch_bound = (1 + Fraction(str(cfg.max_stretch))) * d_st
    main = graph.main_weight

    for iteration in range(1, cfg.max_iterations + 1):
        state.iteration = iteration
        if cfg.cov_penalty_scale > 0 and state.accepted:
            _apply_cov_penalty(state, cfg)
        w = state.overlay.effective_weights(graph, state.cov_extra or None)
        dist, parent = _sssp(graph, w, s, "forward", target=t, heuristic=hdist)
        edges = []
        cur = t
        while cur != s:
            e = parent[cur]
            edges.append(e)
            cur = graph.edge_tail(e)
        edges.reverse()
        path = Path.from_edges(graph, edges, s, weight_name=main)

        fresh = [e for e in edges if state.increase_count.get(e, 0) == 0]
        accept = path.weight <= stretch_bound
        if accept and state.ag_road_edges:
            new_weight = sum(base[e] for e in edges if e not in state.ag_road_edges)
            accept = new_weight >= Fraction(str(cfg.min_difference)) * path.weight
        apply_rejoin_penalty(state, path, cfg)
        if accept:
            state.absorb(path)
        if not fresh:
            break
        for e in sorted(set(edges)):
            _bump_edge(state, e, cfg)
        if cfg.tube_radius > 0:
            apply_tube_increase(state, path, cfg, skip_edges=frozenset(edges))
    return state


def penalty_alternatives(
    graph: RoadGraph,
    s: int,
    t: int,
    cfg: PenaltyConfig | None = None,
    seed: AlternativeGraph | None = None,
) -> AlternativeGraph:
    """Run the penalty loop and return the validated, reduced result.

    ``seed`` (from any other method, same endpoints) pre-populates the
    result; its edges receive one initial round of the path penalty so the
    loop explores beyond it. Raises :class:`NoRoute` when t is unreachable.
    """
    state = run_penalty_loop(graph, s, t, cfg, seed)
    result = ag_from_paths(graph, state.accepted, s, t)
    if seed is not None:
        result = merge([seed, result], graph.main_weight)
    else:
        result = result.reduce()
    return result


def _bump_edge(state: PenaltyState, e: int, cfg: PenaltyConfig) -> None:
    count = state.increase_count.get(e, 0)
    if count >= cfg.max_increases_per_edge:
        return
    if cfg.increase_damping is None:
        factor = cfg.factor_exact
    else:
        factor = 1 + (cfg.factor_exact - 1) * Fraction(str(cfg.increase_damping)) ** count
    if factor > 1:
        state.overlay.scale(e, factor)
    state.increase_count[e] = count + 1


def apply_rejoin_penalty(state: PenaltyState, path: Path, cfg: PenaltyConfig) -> None:
    """Additively penalize the path's edges that hop off or onto the kept routes.

    A leaving edge starts on the current result and ends off it; a joining
    edge does the reverse. The amount is rejoin_penalty * (factor - 1) *
    d(s, t), optionally graded by the junction node's relative position.
    No-op while nothing has been kept yet.
    """
    if not state.ag_nodes or cfg.rejoin_penalty == 0:
        return
    base_amount = (
        Fraction(str(cfg.rejoin_penalty)) * (cfg.factor_exact - 1) * state.d_st
    )
    if base_amount <= 0:
        return
    node_pos = None
    if cfg.rejoin_grading is not None:
        node_pos = _ag_positions(state)
    on = state.ag_nodes
    for e, u, v in zip(path.edges, path.nodes, path.nodes[1:]):
        tail_on, head_on = u in on, v in on
        if tail_on == head_on:
            continue
        junction = u if tail_on else v
        amount = base_amount
        if node_pos is not None:
            amount = amount * Fraction(str(cfg.rejoin_grading(node_pos.get(junction, 0.0))))
        if amount > 0:
            state.overlay.add(e, round_half_up(amount))


def _ag_positions(state: PenaltyState) -> dict[int, float]:
    if not state.accepted:
        return {}
    ag = state.current_ag()
    dist_s, dist_t = ag.shortest_distances()
    out = {}
    for n in ag.nodes:
        df, db = dist_s.get(n, UNREACHABLE), dist_t.get(n, UNREACHABLE)
        if df == UNREACHABLE or db == UNREACHABLE or df + db == 0:
            continue
        out[n] = df / (df + db)
    return out


def apply_tube_increase(
    state: PenaltyState,
    path: Path,
    cfg: PenaltyConfig,
    skip_edges: frozenset[int] = frozenset(),
) -> None:
    """Multiplicatively raise edges near the path, fading with distance.

    An edge qualifies when both endpoints lie within weight-distance
    ``tube_radius`` of some path node (distances on original main weights,
    ignoring edge direction); the factor interpolates from ``factor`` at
    distance 0 down to 1 at the radius via the ``tube_decay`` exponent.
    Tube increases do not consume per-edge increase counts.
    """
    radius = cfg.tube_radius
    if radius <= 0:
        return
    ball = _distance_ball(state.graph, path.nodes, radius)
    k = cfg.factor_exact
    for e in range(state.graph.edge_count):
        if e in skip_edges:
            continue
        u, v = state.graph.endpoints(e)
        du, dv = ball.get(u), ball.get(v)
        if du is None or dv is None:
            continue
        d = min(du, dv)
        if d == 0:
            factor = k
        else:
            shape = (1 - d / radius) ** cfg.tube_decay
            factor = 1 + (k - 1) * Fraction(str(shape))
        if factor > 1:
            state.overlay.scale(e, factor)


def _distance_ball(graph: RoadGraph, sources, radius: int) -> dict[int, int]:
    """Nodes within ``radius`` of any source, ignoring edge direction."""
    w = graph.weight_function()
    dist: dict[int, int] = {}
    heap = []
    for n in sorted(set(sources)):
        dist[n] = 0
        heappush(heap, (0, n))
    while heap:
        d, u = heappop(heap)
        if d > dist.get(u, radius + 1):
            continue
        for e, v in graph.out_edges(u):
            nd = d + w[e]
            if nd <= radius and nd < dist.get(v, radius + 1):
                dist[v] = nd
                heappush(heap, (nd, v))
        for e, v in graph.in_edges(u):
            nd = d + w[e]
            if nd <= radius and nd < dist.get(v, radius + 1):
                dist[v] = nd
                heappush(heap, (nd, v))
    return dist


def _apply_cov_penalty(state: PenaltyState, cfg: PenaltyConfig) -> None:
    """Recompute the balancing penalty from the current result.

    Road edges of the kept routes whose position is covered by fewer
    branches than average get an additive boost proportional to the
    coefficient of variation and the shortfall, nudging the next shortest
    path to deviate exactly where coverage is thin.
    """
    state.cov_extra = {}
    ag = state.current_ag()
    reduced = ag.reduce()
    dists = reduced.shortest_distances()
    mean = total_distance(reduced, dists)
    points, counts = position_profile(reduced, reduced, dists)
    if not counts:
        return
    var = Fraction(0)
    for (a, b), c in zip(zip(points, points[1:]), counts):
        var += (mean - c) ** 2 * (b - a)
    if var == 0:
        return
    cov = float(var) ** 0.5 / float(mean)
    base = state.graph.weight_function()

    def count_at(x: Fraction) -> int:
        for (a, b), c in zip(zip(points, points[1:]), counts):
            if a <= x <= b:
                return c
        return 0

    dist_s, dist_t = dists
    scale = cfg.cov_penalty_scale
    for agedge in reduced.edges:
        pu = _pos_of(dist_s, dist_t, agedge.tail)
        pv = _pos_of(dist_s, dist_t, agedge.head)
        if pu is None or pv is None:
            continue
        mid = (pu + pv) / 2
        shortfall = mean - count_at(mid)
        if shortfall <= 0:
            continue
        for e in agedge.underlying.edges:
            amount = int(scale * cov * float(shortfall) * base[e] + 0.5)
            if amount > 0:
                state.cov_extra[e] = amount


def _pos_of(dist_s, dist_t, n):
    df, db = dist_s.get(n, UNREACHABLE), dist_t.get(n, UNREACHABLE)
    if df == UNREACHABLE or db == UNREACHABLE:
        return None
    total = df + db
    return Fraction(0) if total == 0 else Fraction(df, total)
