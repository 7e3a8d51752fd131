"""Estimator-style routers: configure once, fit a road graph, query routes.

Each router wraps one computation method behind the familiar
fit/transform surface so configs clone, sweep and echo like any other
estimator: hyperparameters live on ``__init__`` verbatim (``get_params`` /
``set_params`` come from :class:`sklearn.base.BaseEstimator`), ``fit``
binds and validates the road graph, ``transform`` maps (source, target)
query pairs to alternative graphs, and ``score`` averages the objective
over queries.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .altgraph import AlternativeGraph
from .graph import RoadGraph
from .metrics import ObjectiveConfig, evaluate
from .methods import (
    ParetoConfig,
    disjoint_candidates,
    pareto_candidates,
    plateau_candidates,
    yen_candidates,
)
from .penalty import PenaltyConfig, penalty_alternatives
from .selection import greedy_select, refine

METHOD_NAMES = ("penalty", "plateau", "disjoint", "yen", "pareto")


def check_graph(graph) -> RoadGraph:
    """Validate a fit input; returns the graph for chaining."""
    if not isinstance(graph, RoadGraph):
        raise TypeError(f"expected a RoadGraph, got {type(graph).__name__}")
    return graph


def check_query(graph: RoadGraph, source, target) -> tuple[int, int]:
    s, t = int(source), int(target)
    for node in (s, t):
        if not (0 <= node < graph.node_count):
            raise ValueError(f"node {node} outside [0, {graph.node_count})")
    return s, t


class BaseRouter(BaseEstimator):
    """Shared fit/transform plumbing; subclasses implement ``_route``."""

    def fit(self, graph: RoadGraph, y=None):
        """Bind a road graph. ``y`` is ignored (present for API parity)."""
        self.graph_ = check_graph(graph)
        return self

    def _fitted_graph(self) -> RoadGraph:
        graph = getattr(self, "graph_", None)
        if graph is None:
            raise NotFittedError(f"{type(self).__name__} is not fitted; call fit(graph) first")
        return graph

    def objective(self) -> ObjectiveConfig:
        return ObjectiveConfig(
            alpha=self.alpha,
            max_decision_edges=self.max_decision_edges,
            max_stretch=self.max_stretch,
            max_cov=self.max_cov,
        )

    def route(self, source: int, target: int) -> AlternativeGraph:
        """Alternative graph for one query."""
        graph = self._fitted_graph()
        s, t = check_query(graph, source, target)
        ag = self._route(graph, s, t)
        if self.post_refine:
            ag = refine(ag, self.objective())
        return ag

    def transform(self, X) -> list[AlternativeGraph]:
        """Alternative graphs for an iterable of (source, target) pairs."""
        return [self.route(s, t) for s, t in X]

    def score(self, X, y=None) -> float:
        """Mean objective score over queries (higher is better)."""
        graph = self._fitted_graph()
        cfg = self.objective()
        total = 0.0
        n = 0
        for s, t in X:
            value, _, _ = evaluate(self.route(s, t), cfg)
            total += float(value)
            n += 1
        return total / n if n else 0.0

    def _route(self, graph: RoadGraph, s: int, t: int) -> AlternativeGraph:
        raise NotImplementedError


class PlateauRouter(BaseRouter):
    """Routes assembled from plateau candidates."""

    def __init__(
        self,
        max_candidates=10,
        partitions=1,
        alpha=1.0,
        max_decision_edges=10,
        max_stretch=0.25,
        max_cov=None,
        post_refine=True,
    ):
        self.max_candidates = max_candidates
        self.partitions = partitions
        self.alpha = alpha
        self.max_decision_edges = max_decision_edges
        self.max_stretch = max_stretch
        self.max_cov = max_cov
        self.post_refine = post_refine

    def _route(self, graph, s, t):
        candidates = plateau_candidates(graph, None, s, t, self.max_candidates, self.partitions)
        return greedy_select(graph, s, t, candidates, self.objective())


class DisjointRouter(BaseRouter):
    """Routes assembled from pairwise edge-disjoint candidates."""

    def __init__(
        self,
        max_candidates=10,
        alpha=1.0,
        max_decision_edges=10,
        max_stretch=0.25,
        max_cov=None,
        post_refine=True,
    ):
        self.max_candidates = max_candidates
        self.alpha = alpha
        self.max_decision_edges = max_decision_edges
        self.max_stretch = max_stretch
        self.max_cov = max_cov
        self.post_refine = post_refine

    def _route(self, graph, s, t):
        candidates = disjoint_candidates(graph, None, s, t, self.max_candidates)
        return greedy_select(graph, s, t, candidates, self.objective())


class YenRouter(BaseRouter):
    """Routes assembled from the k shortest loopless paths."""

    def __init__(
        self,
        k=10,
        alpha=1.0,
        max_decision_edges=10,
        max_stretch=0.25,
        max_cov=None,
        post_refine=True,
    ):
        self.k = k
        self.alpha = alpha
        self.max_decision_edges = max_decision_edges
        self.max_stretch = max_stretch
        self.max_cov = max_cov
        self.post_refine = post_refine

    def _route(self, graph, s, t):
        candidates = yen_candidates(graph, None, s, t, self.k, self.max_stretch)
        return greedy_select(graph, s, t, candidates, self.objective())


class ParetoRouter(BaseRouter):
    """Routes assembled from a tightened multi-criteria frontier."""

    def __init__(
        self,
        criteria=None,
        epsilon=0.25,
        gamma=1.0,
        label_cap=200_000,
        max_candidates=20,
        alpha=1.0,
        max_decision_edges=10,
        max_stretch=0.25,
        max_cov=None,
        post_refine=True,
    ):
        self.criteria = criteria
        self.epsilon = epsilon
        self.gamma = gamma
        self.label_cap = label_cap
        self.max_candidates = max_candidates
        self.alpha = alpha
        self.max_decision_edges = max_decision_edges
        self.max_stretch = max_stretch
        self.max_cov = max_cov
        self.post_refine = post_refine

    def fit(self, graph, y=None):
        super().fit(graph, y)
        names = tuple(self.criteria) if self.criteria else graph.weight_names
        if len(names) < 2:
            raise ValueError(
                "pareto routing needs at least two weight functions; "
                f"graph provides {graph.weight_names}"
            )
        missing = [n for n in names if n not in graph.weight_names]
        if missing:
            raise ValueError(f"unknown weight functions: {missing}")
        self.criteria_ = names
        return self

    def _route(self, graph, s, t):
        cfg = ParetoConfig(self.criteria_, self.epsilon, self.gamma)
        candidates = pareto_candidates(graph, s, t, cfg, self.label_cap)
        candidates = candidates[: self.max_candidates]
        return greedy_select(graph, s, t, candidates, self.objective())


class PenaltyRouter(BaseRouter):
    """Routes computed by iterative penalization, optionally seeded."""

    def __init__(
        self,
        factor=1.4,
        rejoin_penalty=0.5,
        rejoin_grading=None,
        max_increases_per_edge=4,
        increase_damping=None,
        max_iterations=20,
        tube_radius=0,
        tube_decay=1.0,
        cov_penalty_scale=0.0,
        min_difference=0.2,
        seed_method=None,
        alpha=1.0,
        max_decision_edges=10,
        max_stretch=0.25,
        max_cov=None,
        post_refine=True,
    ):
        self.factor = factor
        self.rejoin_penalty = rejoin_penalty
        self.rejoin_grading = rejoin_grading
        self.max_increases_per_edge = max_increases_per_edge
        self.increase_damping = increase_damping
        self.max_iterations = max_iterations
        self.tube_radius = tube_radius
        self.tube_decay = tube_decay
        self.cov_penalty_scale = cov_penalty_scale
        self.min_difference = min_difference
        self.seed_method = seed_method
        self.alpha = alpha
        self.max_decision_edges = max_decision_edges
        self.max_stretch = max_stretch
        self.max_cov = max_cov
        self.post_refine = post_refine

    def penalty_config(self) -> PenaltyConfig:
        return PenaltyConfig(
            factor=self.factor,
            rejoin_penalty=self.rejoin_penalty,
            rejoin_grading=self.rejoin_grading,
            max_increases_per_edge=self.max_increases_per_edge,
            increase_damping=self.increase_damping,
            max_iterations=self.max_iterations,
            tube_radius=self.tube_radius,
            tube_decay=self.tube_decay,
            cov_penalty_scale=self.cov_penalty_scale,
            max_stretch=self.max_stretch,
            min_difference=self.min_difference,
        )

    def _route(self, graph, s, t):
        seed = None
        if self.seed_method is not None:
            seeder = make_router(self.seed_method, post_refine=False)
            seed = seeder.fit(graph).route(s, t)
        return penalty_alternatives(graph, s, t, self.penalty_config(), seed)


_ROUTERS = {
    "penalty": PenaltyRouter,
    "plateau": PlateauRouter,
    "disjoint": DisjointRouter,
    "yen": YenRouter,
    "pareto": ParetoRouter,
}


def make_router(method: str, **params) -> BaseRouter:
    """Instantiate a router by method name with keyword overrides."""
    try:
        cls = _ROUTERS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {METHOD_NAMES}") from None
    valid = cls().get_params()
    kwargs = {k: v for k, v in params.items() if k in valid}
    return cls(**kwargs)
