from __future__ import annotations

import random
import sys
from pathlib import Path as FilePath

import pytest

sys.path.insert(0, str(FilePath(__file__).parent))

from altroute import Path, RoadGraph, WeightOverlay, ag_from_paths, shortest_path


def chain_graph(weights):
    """0 -> 1 -> ... -> len(weights)."""
    arcs = [(i, i + 1, w) for i, w in enumerate(weights)]
    return RoadGraph.from_arcs(len(weights) + 1, arcs)


def diamond_graph(w_sa=1, w_at=1, w_sb=1, w_bt=1):
    """s=0, a=1, b=2, t=3; edge ids: s->a, a->t, s->b, b->t."""
    return RoadGraph.from_arcs(
        4, [(0, 1, w_sa), (1, 3, w_at), (0, 2, w_sb), (2, 3, w_bt)]
    )


def unit_grid(width, height):
    """Bidirected grid, every arc weight 1."""
    arcs = []
    for y in range(height):
        for x in range(width):
            node = y * width + x
            for dx, dy in ((1, 0), (0, 1), (-1, 0), (0, -1)):
                nx, ny = x + dx, y + dy
                if 0 <= nx < width and 0 <= ny < height:
                    arcs.append((node, ny * width + nx, 1))
    coords = [(float(i % width), float(i // width)) for i in range(width * height)]
    return RoadGraph.from_arcs(width * height, arcs, coordinates=coords)


def random_graph(rng: random.Random, nodes: int, extra_arcs: int, wmax: int = 20):
    """Backbone 0->1->...->n-1 plus random arcs; s=0 reaches t=n-1."""
    arcs = [(i, i + 1, rng.randint(1, wmax)) for i in range(nodes - 1)]
    for _ in range(extra_arcs):
        u = rng.randrange(nodes)
        v = rng.randrange(nodes)
        if u == v:
            continue
        arcs.append((u, v, rng.randint(1, wmax)))
    return RoadGraph.from_arcs(nodes, arcs)


def random_st_path(rng: random.Random, graph: RoadGraph, s: int, t: int) -> Path:
    """A random simple s->t path: shortest under throwaway random weights,
    reported under the graph's main weight function."""
    scramble = WeightOverlay(additive={e: rng.randint(0, 60) for e in range(graph.edge_count)})
    found = shortest_path(graph, scramble, s, t)
    return found.reweighted(graph, graph.main_weight)


def random_ag(rng: random.Random, graph: RoadGraph, s: int, t: int, n_paths: int):
    paths = [random_st_path(rng, graph, s, t) for _ in range(n_paths)]
    return ag_from_paths(graph, paths, s, t)


@pytest.fixture
def rng():
    return random.Random(20260810)
