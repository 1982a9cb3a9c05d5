"""Random connected spring graphs for sweeps and property tests."""

from __future__ import annotations

import random

from .model import SpringGraph, graph_from_edges


def random_connected_graph(
    rng: random.Random, n_max: int = 7, m_max: int = 10, n_min: int = 2
) -> SpringGraph:
    """Random spanning tree plus extra springs (parallel springs allowed).

    Orientations, spring numbering and the loading nodes are all random.
    """
    n = rng.randint(n_min, n_max)
    m = rng.randint(n - 1, max(n - 1, m_max))
    order = list(range(1, n + 1))
    rng.shuffle(order)
    edges = [(order[k], order[rng.randrange(k)]) for k in range(1, n)]
    while len(edges) < m:
        a, b = rng.sample(range(1, n + 1), 2)
        edges.append((a, b))
    edges = [(a, b) if rng.random() < 0.5 else (b, a) for a, b in edges]
    rng.shuffle(edges)
    phi, psi = rng.sample(range(1, n + 1), 2)
    return graph_from_edges(n, edges, phi, psi)
