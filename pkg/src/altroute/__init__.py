"""altroute: alternative route graphs for road networks.

Compute compact unions of good alternative routes between two nodes of a
weighted directed graph, measure their quality exactly, and compare the
computation methods (penalty, plateau, disjoint, yen, pareto) under one
objective.
"""

from .altgraph import AGEdge, AlternativeGraph, Violation, ag_from_paths, merge
from .estimators import (
    BaseRouter,
    DisjointRouter,
    ParetoRouter,
    PenaltyRouter,
    PlateauRouter,
    YenRouter,
    make_router,
)
from .exceptions import (
    AltRouteError,
    ArcCountMismatch,
    DataFormatError,
    DocumentError,
    IdOutOfRange,
    InvalidPath,
    LabelCapExceeded,
    MalformedHeader,
    MissingCoordinates,
    MixedEndpoints,
    NegativeWeight,
    NoCandidates,
    NodeNotInAG,
    NoRoute,
    ZeroBaseDistance,
)
from .graph import (
    Path,
    RoadGraph,
    ShortestPathTree,
    UNREACHABLE,
    WeightOverlay,
    dijkstra,
    shortest_path,
)
from .io import generate_grid, generate_ring, load_dimacs, write_dimacs
from .metrics import (
    MetricsReport,
    ObjectiveConfig,
    average_distance,
    coefficient_of_variation,
    compute_metrics,
    decision_edges,
    evaluate,
    pos,
    total_distance,
    variance,
)
from .methods import (
    Candidate,
    ParetoConfig,
    disjoint_candidates,
    pareto_candidates,
    plateau_candidates,
    yen_candidates,
)
from .penalty import PenaltyConfig, PenaltyState, apply_rejoin_penalty, apply_tube_increase, penalty_alternatives
from .selection import greedy_select, refine

__version__ = "0.1.0"
