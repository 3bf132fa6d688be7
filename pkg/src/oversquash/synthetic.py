"""Seeded synthetic corpora for tests and benchmarks."""

from __future__ import annotations

import itertools

import numpy as np

from .graph import Graph, build_graph


def random_tree(rng: np.random.Generator, n: int) -> Graph:
    """Random recursive tree: node ``i`` attaches to a uniform earlier node."""
    return build_graph(n, [(i, int(rng.integers(0, i))) for i in range(1, n)])


def tree_corpus(count: int = 40, sizes: tuple[int, int] = (10, 25), seed: int = 0) -> list[Graph]:
    """``count`` random recursive trees with node counts drawn from ``[lo, hi)``."""
    rng = np.random.default_rng(seed)
    return [random_tree(rng, int(n)) for n in rng.integers(sizes[0], sizes[1], count)]


def random_connected_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    order = rng.permutation(n)
    edges = [(int(order[i]), int(order[rng.integers(0, i)])) for i in range(1, n)]
    edges += [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return build_graph(n, edges)


def graph_corpus(count: int = 40, sizes: tuple[int, int] = (8, 20), p: float = 0.1,
                 seed: int = 0) -> list[Graph]:
    """Connected sparse graphs: a random spanning tree plus Erdos-Renyi extras."""
    rng = np.random.default_rng(seed)
    return [random_connected_graph(rng, int(n), p) for n in rng.integers(sizes[0], sizes[1], count)]
