"""Normalized sensitivity of a linear message-passing model to its inputs.

For a target node ``v`` and depth ``ell`` the sensitivity profile is column
``v`` of ``(A + I)^ell`` divided by its column sum. It is computed by
repeatedly applying ``A + I`` to the indicator of ``v`` and rescaling the
working vector to unit sum after every step; the final normalization cancels
any positive scale, so the rescaling is exact and only prevents overflow.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from . import _backend
from .graph import ComponentLabeling, Graph, NoMeasurablePairs, connected_components, diameter


@dataclass(frozen=True)
class LayerRange:
    """Inclusive depth range ``[start, end]`` used for the decay fit."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.end < self.start + 1:
            raise ValueError(f"invalid layer range [{self.start}, {self.end}]")

    @property
    def layers(self) -> range:
        return range(self.start, self.end + 1)

    def __len__(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class SensitivityColumn:
    target: int
    layer: int
    values: np.ndarray


@dataclass(frozen=True)
class PairSeries:
    source: int
    target: int
    layers: tuple[int, ...]
    values: np.ndarray
    valid: bool


def layer_range_for_diameter(d: int) -> LayerRange:
    return LayerRange(d, max(2 * d - 1, d + 1))


def layer_range(g: Graph) -> LayerRange:
    """Depths ``D .. 2D-1`` for graph diameter ``D``, widened to two points when ``D == 1``.

    Raises:
        NoMeasurablePairs: when no component has two or more nodes.
    """
    d = diameter(g).value
    if d < 1:
        raise NoMeasurablePairs("every component is a singleton")
    return layer_range_for_diameter(d)


def _check_target(g: Graph, v: int) -> None:
    if not 0 <= v < g.num_nodes:
        raise ValueError(f"target {v} out of range for {g.num_nodes} nodes")


def normalized_column(g: Graph, v: int, layer: int) -> SensitivityColumn:
    _check_target(g, v)
    if layer < 0:
        raise ValueError("layer must be nonnegative")
    indptr, indices = g.csr()
    values = _backend.kernels.normalized_columns(indptr, indices, v, layer, layer)[0]
    return SensitivityColumn(v, layer, values)


def normalized_columns(g: Graph, v: int, r: LayerRange) -> np.ndarray:
    """All columns for target ``v`` over ``r`` as a ``(len(r), n)`` array, one pass."""
    _check_target(g, v)
    indptr, indices = g.csr()
    return _backend.kernels.normalized_columns(indptr, indices, v, r.start, r.end)


def column_series(
    g: Graph,
    v: int,
    r: LayerRange,
    components: ComponentLabeling | None = None,
) -> Iterator[PairSeries]:
    """Per-source series for target ``v`` in ascending source order.

    Sources outside ``v``'s component yield all-zero series with ``valid=False``.
    """
    comps = components if components is not None else connected_components(g)
    cols = normalized_columns(g, v, r)
    layers = tuple(r.layers)
    for u in range(g.num_nodes):
        series = cols[:, u].copy()
        valid = bool(comps.label[u] == comps.label[v] and np.all(series > 0.0))
        yield PairSeries(u, v, layers, series, valid)


def dense_column(g: Graph, v: int, layer: int) -> np.ndarray:
    """Reference value from an explicit matrix power; small graphs only."""
    a = g.dense_adjacency() + np.eye(g.num_nodes)
    col = np.linalg.matrix_power(a, layer)[:, v]
    return col / col.sum()


def write_series_csv(g: Graph, r: LayerRange, path: str | Path) -> None:
    """Dump every same-component ``(v, u, ell, jtilde)`` value with 17 significant digits."""
    comps = connected_components(g)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["v", "u", "ell", "jtilde"])
        for v in range(g.num_nodes):
            cols = normalized_columns(g, v, r)
            for u in range(g.num_nodes):
                if comps.label[u] != comps.label[v]:
                    continue
                for i, ell in enumerate(r.layers):
                    w.writerow([v, u, ell, format(float(cols[i, u]), ".17g")])
