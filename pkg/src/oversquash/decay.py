"""Exponential decay rates of pairwise sensitivity.

Each ordered pair ``(v, u)`` gets the rate ``k`` of the model
``jtilde = N0 * exp(-k * ell)``, fitted by ordinary least squares on
``(ell, ln jtilde)`` over the graph's layer range. Positive ``k`` means the
sensitivity of ``v`` to ``u`` shrinks with depth.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from . import _backend
from .graph import ComponentLabeling, Graph, NoMeasurablePairs, connected_components, diameter
from .sensitivity import LayerRange, layer_range_for_diameter


class InvalidSeries(ValueError):
    """Raised when a series cannot be fitted on a log scale."""


@dataclass(frozen=True)
class DecayFit:
    k: float
    ln_n0: float
    num_points: int
    r_squared: float | None = None


@dataclass(frozen=True)
class PairDecay:
    source: int
    target: int
    fit: DecayFit

    @property
    def k(self) -> float:
        return self.fit.k


def fit_decay(points: Sequence[tuple[float, float]], diagnostics: bool = False) -> DecayFit:
    """Least-squares fit of ``ln jtilde = ln_n0 - k * ell``.

    Args:
        points: ``(ell, jtilde)`` pairs; at least two, all ``jtilde > 0``.
        diagnostics: also compute the coefficient of determination.

    Raises:
        InvalidSeries: on fewer than two points, repeated-only depths or a
            non-positive value.
    """
    if len(points) < 2:
        raise InvalidSeries("need at least two points")
    ells = [float(p[0]) for p in points]
    vals = [float(p[1]) for p in points]
    if any(not (y > 0.0) for y in vals):
        raise InvalidSeries("sensitivity values must be positive")
    ys = [math.log(y) for y in vals]
    n = len(points)
    lbar = sum(ells) / n
    ybar = sum(ys) / n
    sxx = sum((x - lbar) * (x - lbar) for x in ells)
    if sxx == 0.0:
        raise InvalidSeries("all points share one depth")
    sxy = sum((x - lbar) * (y - ybar) for x, y in zip(ells, ys))
    slope = sxy / sxx
    r2 = None
    if diagnostics:
        syy = sum((y - ybar) ** 2 for y in ys)
        r2 = 1.0 if syy == 0.0 else (sxy * sxy) / (sxx * syy)
    return DecayFit(-slope, ybar - slope * lbar, n, r2)


@dataclass(frozen=True)
class DecayMatrix:
    """All pair rates of one graph; entry ``[v, u]`` is the rate of target ``v`` for source ``u``."""

    k: np.ndarray
    ln_n0: np.ndarray
    valid: np.ndarray
    layers: LayerRange
    components: ComponentLabeling

    @property
    def num_nodes(self) -> int:
        return self.k.shape[0]

    def pairs(self) -> Iterator[PairDecay]:
        npts = len(self.layers)
        for v, u in zip(*np.nonzero(self.valid)):
            yield PairDecay(
                int(u), int(v), DecayFit(float(self.k[v, u]), float(self.ln_n0[v, u]), npts)
            )

    def valid_rates(self) -> np.ndarray:
        """Rates of valid pairs in target-major, source-ascending order."""
        return self.k[self.valid]


def decay_matrix(g: Graph, threads: int = 1) -> DecayMatrix:
    """Fit every ordered same-component pair ``u != v``.

    Slopes no larger than the rounding bound of the sweep are stored as exactly
    0, so series that are constant in exact arithmetic never count as decaying.
    The bound is ``(end * (dmax + 2) + max|ln jtilde|) * eps * sum|l - lbar| / Sxx``:
    each step sums at most ``dmax + 2`` positive terms, and ``log`` adds one more
    rounding. It is below 1e-12 for any graph this package can hold in memory.

    Raises:
        NoMeasurablePairs: when every component is a singleton.
    """
    comps = connected_components(g)
    d = diameter(g, comps).value
    if d < 1:
        raise NoMeasurablePairs("every component is a singleton")
    r = layer_range_for_diameter(d)
    n = g.num_nodes
    indptr, indices = g.csr()
    k = np.empty((n, n))
    n0 = np.empty((n, n))
    kernels = _backend.kernels
    targets = np.arange(n, dtype=np.int64)
    if threads <= 1 or n < 2 * threads:
        kernels.decay_rows(indptr, indices, targets, r.start, r.end, k, n0)
    else:
        bounds = np.linspace(0, n, threads + 1).astype(int)

        def run(i: int) -> None:
            lo, hi = bounds[i], bounds[i + 1]
            kernels.decay_rows(indptr, indices, targets[lo:hi], r.start, r.end, k[lo:hi], n0[lo:hi])

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(threads)))
    label = comps.label
    valid = (label[:, None] == label[None, :]) & ~np.eye(n, dtype=bool) & np.isfinite(k)
    return DecayMatrix(k, n0, valid, r, comps)


def graph_decay_rates(g: Graph) -> Iterator[PairDecay]:
    """Stream pair rates ordered by target, then source."""
    yield from decay_matrix(g).pairs()


def expected_pair_count(comps: ComponentLabeling) -> int:
    return sum(s * (s - 1) for s in comps.sizes)


def write_pairs_csv(dm: DecayMatrix, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "v", "k", "ln_n0"])
        for pd in dm.pairs():
            w.writerow(
                [pd.source, pd.target, format(pd.fit.k, ".17g"), format(pd.fit.ln_n0, ".17g")]
            )
