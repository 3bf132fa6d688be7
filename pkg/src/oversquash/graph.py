"""Undirected simple graphs with connectivity and hop-distance primitives."""

from __future__ import annotations

import logging
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

UNREACHABLE = -1


class GraphError(ValueError):
    """Raised for malformed graph input."""


class NoMeasurablePairs(ValueError):
    """Raised when every component of a graph is a singleton."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph on nodes ``0..num_nodes-1``.

    Build instances with :func:`build_graph`; the constructor trusts its input.
    """

    num_nodes: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...]
    self_loops_dropped: int = 0
    _csr: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False, compare=False)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degree(self) -> np.ndarray:
        return np.array([len(nbrs) for nbrs in self.adjacency], dtype=np.int64)

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        nbrs = self.adjacency[u]
        i = bisect_left(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(indptr, indices)`` with neighbors in ascending order."""
        if self._csr is None:
            deg = self.degree()
            indptr = np.zeros(self.num_nodes + 1, dtype=np.int64)
            np.cumsum(deg, out=indptr[1:])
            indices = np.fromiter(
                (w for nbrs in self.adjacency for w in nbrs),
                dtype=np.int64,
                count=int(indptr[-1]),
            )
            object.__setattr__(self, "_csr", (indptr, indices))
        return self._csr

    def dense_adjacency(self) -> np.ndarray:
        a = np.zeros((self.num_nodes, self.num_nodes))
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    def edge_list(self) -> list[tuple[int, int]]:
        return list(self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.num_nodes == other.num_nodes and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.num_nodes, self.edges))


def build_graph(num_nodes: int, edge_list: Iterable[Sequence[int]]) -> Graph:
    """Build a deduplicated simple graph.

    Reversed and repeated edges collapse to one; self-loops are dropped and
    tallied in ``self_loops_dropped``.

    Raises:
        GraphError: if ``num_nodes`` is negative or an endpoint is out of range.
    """
    num_nodes = int(num_nodes)
    if num_nodes < 0:
        raise GraphError(f"negative node count {num_nodes}")
    edge_set: set[tuple[int, int]] = set()
    loops = 0
    for i, edge in enumerate(edge_list):
        u, v = int(edge[0]), int(edge[1])
        if not (0 <= u < num_nodes and 0 <= v < num_nodes):
            raise GraphError(
                f"edge #{i} ({u}, {v}) has an index out of range for {num_nodes} nodes"
            )
        if u == v:
            loops += 1
            continue
        edge_set.add((u, v) if u < v else (v, u))
    if loops:
        logger.warning("dropped %d input self-loop(s)", loops)
    edges = tuple(sorted(edge_set))
    nbrs: list[list[int]] = [[] for _ in range(num_nodes)]
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    adjacency = tuple(tuple(sorted(x)) for x in nbrs)
    return Graph(num_nodes, edges, adjacency, loops)


@dataclass(frozen=True)
class ComponentLabeling:
    label: np.ndarray
    sizes: tuple[int, ...]

    @property
    def num_components(self) -> int:
        return len(self.sizes)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.label == c)


@dataclass(frozen=True)
class Diameter:
    value: int
    per_component: tuple[int, ...]


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distances from ``source``; unreachable nodes hold ``UNREACHABLE`` (-1)."""
    if not 0 <= source < g.num_nodes:
        raise GraphError(f"source {source} out of range")
    dist = np.full(g.num_nodes, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in g.adjacency[u]:
            if dist[w] == UNREACHABLE:
                dist[w] = du
                queue.append(w)
    return dist


def connected_components(g: Graph) -> ComponentLabeling:
    # scanning nodes in index order makes component ids follow their smallest member
    label = np.full(g.num_nodes, -1, dtype=np.int64)
    sizes: list[int] = []
    for s in range(g.num_nodes):
        if label[s] >= 0:
            continue
        c = len(sizes)
        label[s] = c
        queue = deque([s])
        count = 0
        while queue:
            u = queue.popleft()
            count += 1
            for w in g.adjacency[u]:
                if label[w] < 0:
                    label[w] = c
                    queue.append(w)
        sizes.append(count)
    return ComponentLabeling(label, tuple(sizes))


def diameter(g: Graph, components: ComponentLabeling | None = None) -> Diameter:
    """Largest eccentricity within each component; singletons count as 0."""
    comps = components if components is not None else connected_components(g)
    per = [0] * comps.num_components
    for s in range(g.num_nodes):
        c = comps.label[s]
        if comps.sizes[c] < 2:
            continue
        ecc = int(bfs_distances(g, s).max())
        if ecc > per[c]:
            per[c] = ecc
    return Diameter(max(per, default=0), tuple(per))


def induced_subgraph(g: Graph, nodes: Sequence[int]) -> tuple[Graph, np.ndarray]:
    """Subgraph on ``nodes`` reindexed in ascending order, plus the old-id mapping."""
    mapping = np.array(sorted(int(x) for x in nodes), dtype=np.int64)
    new_id = {int(old): i for i, old in enumerate(mapping)}
    edges = [
        (new_id[u], new_id[v]) for u, v in g.edges if u in new_id and v in new_id
    ]
    return build_graph(len(mapping), edges), mapping


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Apply the node permutation ``old -> perm[old]``."""
    return build_graph(g.num_nodes, [(perm[u], perm[v]) for u, v in g.edges])


def add_edges(g: Graph, new_edges: Iterable[tuple[int, int]]) -> Graph:
    return build_graph(g.num_nodes, list(g.edges) + list(new_edges))
