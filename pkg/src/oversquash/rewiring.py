"""Graph rewiring treatments.

Three reconstructions of published rewiring schemes plus an import path for
graphs rewired by external tools:

* ``gtr``  greedily adds the edge that most reduces total effective resistance,
  tracking the Laplacian pseudoinverse with rank-one updates;
* ``digl`` keeps the pairs whose personalized PageRank diffusion weight clears
  a threshold;
* ``fosr`` adds edges that approximately increase the spectral gap, scored by a
  deflated power-iteration estimate of the first nontrivial eigenvector.

Every treatment keeps the node set and returns an unweighted simple graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph, build_graph, connected_components, induced_subgraph

METHODS = ("digl", "gtr", "fosr", "import")


class RewireError(ValueError):
    """Raised when a treatment cannot be applied to a graph."""


@dataclass(frozen=True)
class RewireParams:
    method: str
    alpha: float = 0.15
    eps: float = 1e-4
    num_edges: int = 1
    init_iters: int = 50
    seed: int = 0
    path: str | None = None

    def validate(self) -> None:
        if self.method not in METHODS:
            raise RewireError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.method == "digl":
            if not 0.0 < self.alpha < 1.0:
                raise RewireError(f"alpha must lie in (0, 1), got {self.alpha}")
            if self.eps < 0.0:
                raise RewireError(f"eps must be nonnegative, got {self.eps}")
        if self.method in ("gtr", "fosr") and self.num_edges < 0:
            raise RewireError(f"num_edges must be nonnegative, got {self.num_edges}")
        if self.method == "fosr" and self.init_iters < 0:
            raise RewireError(f"init_iters must be nonnegative, got {self.init_iters}")
        if self.method == "import" and not self.path:
            raise RewireError("import needs a path")


def rewire(g: Graph, p: RewireParams) -> Graph:
    p.validate()
    if p.method == "gtr":
        return rewire_gtr(g, p.num_edges)
    if p.method == "digl":
        return rewire_digl(g, p.alpha, p.eps)
    if p.method == "fosr":
        return rewire_fosr(g, p.num_edges, p.init_iters, p.seed)
    return import_rewired(p.path, g)


@dataclass(frozen=True)
class EdgeAccounting:
    added: int
    removed: int

    @property
    def net(self) -> int:
        return self.added - self.removed

    def as_dict(self) -> dict:
        return {"added": self.added, "removed": self.removed, "net": self.net}


def edge_accounting(before: Graph, after: Graph) -> EdgeAccounting:
    b, a = set(before.edges), set(after.edges)
    return EdgeAccounting(len(a - b), len(b - a))


# -- effective resistance -----------------------------------------------------


def laplacian(g: Graph) -> np.ndarray:
    a = g.dense_adjacency()
    return np.diag(a.sum(axis=1)) - a


def laplacian_pinv(g: Graph) -> np.ndarray:
    """Pseudoinverse of a connected graph's Laplacian via ``inv(L + J/n) - J/n``."""
    n = g.num_nodes
    j = np.full((n, n), 1.0 / n)
    lp = np.linalg.inv(laplacian(g) + j) - j
    return (lp + lp.T) / 2.0


@dataclass
class ResistanceState:
    """Laplacian pseudoinverse of one connected component.

    ``nodes[i]`` is the original id of local index ``i``.
    """

    laplacian_pinv: np.ndarray
    nodes: np.ndarray

    @classmethod
    def from_graph(cls, g: Graph, nodes=None) -> "ResistanceState":
        """Build over ``nodes`` (default: the largest component, ties to the smallest id)."""
        if nodes is None:
            nodes = _largest_component_nodes(g)
        sub, mapping = induced_subgraph(g, nodes)
        if connected_components(sub).num_components != 1:
            raise RewireError("resistance state needs a connected node set")
        return cls(laplacian_pinv(sub), mapping)

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def total_resistance(self) -> float:
        return float(self.size * np.trace(self.laplacian_pinv))

    def local(self, u: int) -> int:
        i = int(np.searchsorted(self.nodes, u))
        if i >= self.size or self.nodes[i] != u:
            raise RewireError(f"node {u} is outside the operative component (infinite resistance)")
        return i

    def resistance_matrix(self) -> np.ndarray:
        lp = self.laplacian_pinv
        d = np.diag(lp)
        return d[:, None] + d[None, :] - 2.0 * lp

    def total_decrease(self) -> np.ndarray:
        """Drop in total resistance from adding each local pair ``(i, j)``."""
        lp = self.laplacian_pinv
        sq = lp @ lp
        d = np.diag(sq)
        num = d[:, None] + d[None, :] - 2.0 * sq
        return self.size * num / (1.0 + self.resistance_matrix())

    def add_edge_local(self, i: int, j: int) -> None:
        lp = self.laplacian_pinv
        x = lp[:, i] - lp[:, j]
        denom = 1.0 + x[i] - x[j]
        self.laplacian_pinv = lp - np.outer(x, x) / denom


def effective_resistance(rs: ResistanceState, u: int, v: int) -> float:
    i, j = rs.local(u), rs.local(v)
    lp = rs.laplacian_pinv
    return float(lp[i, i] + lp[j, j] - 2.0 * lp[i, j])


def _largest_component_nodes(g: Graph) -> np.ndarray:
    comps = connected_components(g)
    # ids follow the smallest member, so argmax breaks size ties toward node 0
    c = int(np.argmax(comps.sizes))
    return comps.members(c)


def _lexicographic_argmax(scores: np.ndarray) -> tuple[int, int]:
    """Upper-triangle argmax; exact ties go to the smallest ``(i, j)``."""
    best = np.max(scores)
    i, j = np.argwhere(scores == best)[0]
    return int(i), int(j)


def rewire_gtr(g: Graph, num_edges: int) -> Graph:
    """Greedy total-resistance rewiring on the largest component."""
    rs = ResistanceState.from_graph(g)
    if rs.size < 3 and num_edges > 0:
        raise RewireError("no candidate non-edges in the operative component")
    sub_adj = np.zeros((rs.size, rs.size), dtype=bool)
    local = {int(u): i for i, u in enumerate(rs.nodes)}
    for u, v in g.edges:
        if u in local and v in local:
            sub_adj[local[u], local[v]] = sub_adj[local[v], local[u]] = True
    upper = np.triu(np.ones_like(sub_adj), k=1)
    added: list[tuple[int, int]] = []
    for _ in range(num_edges):
        candidate = upper & ~sub_adj
        if not candidate.any():
            raise RewireError("no candidate non-edges in the operative component")
        scores = np.where(candidate, rs.total_decrease(), -np.inf)
        i, j = _lexicographic_argmax(scores)
        rs.add_edge_local(i, j)
        sub_adj[i, j] = sub_adj[j, i] = True
        added.append((int(rs.nodes[i]), int(rs.nodes[j])))
    return build_graph(g.num_nodes, list(g.edges) + added)


# -- diffusion ----------------------------------------------------------------


@dataclass(frozen=True)
class DiffusionMatrix:
    S: np.ndarray
    alpha: float


def ppr(g: Graph, alpha: float) -> DiffusionMatrix:
    """Personalized PageRank diffusion ``alpha (I - (1 - alpha) A D^-1)^-1``.

    Solved per component, so entries between components are exactly zero.
    Isolated nodes walk to themselves and get the indicator column.
    """
    if not 0.0 < alpha < 1.0:
        raise RewireError(f"alpha must lie in (0, 1), got {alpha}")
    n = g.num_nodes
    s = np.zeros((n, n))
    comps = connected_components(g)
    a = g.dense_adjacency()
    for c in range(comps.num_components):
        idx = comps.members(c)
        if idx.shape[0] == 1:
            s[idx[0], idx[0]] = 1.0
            continue
        sub = a[np.ix_(idx, idx)]
        t = sub / sub.sum(axis=0)
        m = np.eye(idx.shape[0]) - (1.0 - alpha) * t
        s[np.ix_(idx, idx)] = np.linalg.solve(m, alpha * np.eye(idx.shape[0]))
    return DiffusionMatrix(s, alpha)


def rewire_digl(g: Graph, alpha: float = 0.15, eps: float = 1e-4) -> Graph:
    """Keep ``{u, v}`` when either diffusion weight between them is at least ``eps``."""
    if eps < 0.0:
        raise RewireError(f"eps must be nonnegative, got {eps}")
    s = ppr(g, alpha).S
    keep = (s >= eps) & (s > 0.0)
    keep = keep | keep.T
    np.fill_diagonal(keep, False)
    iu, ju = np.nonzero(np.triu(keep, k=1))
    return build_graph(g.num_nodes, zip(iu.tolist(), ju.tolist()))


# -- spectral gap ---------------------------------------------------------------


def _normalized_step(g_adj: np.ndarray, sqrt_deg: np.ndarray, x: np.ndarray) -> np.ndarray:
    inv = np.divide(1.0, sqrt_deg, out=np.zeros_like(sqrt_deg), where=sqrt_deg > 0)
    return inv * (g_adj @ (inv * x))


def _deflate(x: np.ndarray, sqrt_deg: np.ndarray) -> np.ndarray:
    nn = float(sqrt_deg @ sqrt_deg)
    if nn > 0.0:
        # second pass removes the rounding residue of the first
        for _ in range(2):
            x = x - (float(x @ sqrt_deg) / nn) * sqrt_deg
    norm = float(np.linalg.norm(x))
    return x / norm if norm > 0.0 else x


def fosr_vector(adj: np.ndarray, x: np.ndarray, iters: int) -> np.ndarray:
    """``iters`` deflated power-iteration steps of ``D^-1/2 A D^-1/2`` from ``x``."""
    sqrt_deg = np.sqrt(adj.sum(axis=1))
    x = _deflate(x, sqrt_deg)
    for _ in range(iters):
        x = _deflate(_normalized_step(adj, sqrt_deg, x), sqrt_deg)
    return x


def fosr_scores(x: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    return np.outer(x, x) / np.sqrt(np.outer(1.0 + degrees, 1.0 + degrees))


def rewire_fosr(g: Graph, num_edges: int, init_iters: int = 50, seed: int = 0) -> Graph:
    """Add ``num_edges`` edges minimizing ``x_u x_v / sqrt((1 + d_u)(1 + d_v))``."""
    n = g.num_nodes
    adj = g.dense_adjacency()
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=n)
    x = fosr_vector(adj, x / np.linalg.norm(x) if n else x, init_iters)
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    added: list[tuple[int, int]] = []
    for _ in range(num_edges):
        candidate = upper & (adj == 0)
        if not candidate.any():
            raise RewireError("no candidate non-edges")
        scores = np.where(candidate, -fosr_scores(x, adj.sum(axis=1)), -np.inf)
        i, j = _lexicographic_argmax(scores)
        adj[i, j] = adj[j, i] = 1.0
        added.append((i, j))
        x = fosr_vector(adj, x, 1)
    return build_graph(n, list(g.edges) + added)


# -- import ---------------------------------------------------------------------


def import_rewired(path: str | Path, base: Graph) -> Graph:
    """Read an externally rewired edge list onto ``base``'s node set."""
    from .formats import FormatError, parse_edge_list

    text = Path(path).read_text()
    header_n, edges = parse_edge_list(text, str(path))
    if header_n is not None and header_n != base.num_nodes:
        raise RewireError(f"{path}: header declares {header_n} nodes, base graph has {base.num_nodes}")
    for u, v in edges:
        if max(u, v) >= base.num_nodes:
            raise RewireError(
                f"{path}: edge ({u}, {v}) references a node beyond the base graph's {base.num_nodes}"
            )
    try:
        return build_graph(base.num_nodes, edges)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
