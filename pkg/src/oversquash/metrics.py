"""Graph-level and dataset-level over-squashing statistics."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .decay import DecayMatrix, PairDecay

METRICS = ("prevalence", "intensity", "variability", "extremity")

# rate bands: below LOW is the weakest label, above HIGH the strongest, both
# boundaries themselves fall in the middle band
RATE_LOW, RATE_HIGH = 0.13, 0.23
PREVALENCE_LOW, PREVALENCE_HIGH = 0.25, 0.50


@dataclass(frozen=True)
class GraphSummary:
    prevalence: float
    intensity: float
    variability: float
    extremity: float
    valid_pairs: int
    positive_pairs: int
    excluded_cross_component_pairs: int = 0

    @property
    def measurable(self) -> bool:
        return self.valid_pairs > 0

    def metric(self, name: str) -> float:
        return float(getattr(self, name))

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CategoryLabels:
    prevalence: str
    intensity: str
    variability: str
    extremity: str
    intensity_half_life: float
    extremity_half_life: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DatasetSummary:
    prevalence: float
    intensity: float
    variability: float
    extremity: float
    graphs_counted: int
    graphs_skipped: int

    def metric(self, name: str) -> float:
        return float(getattr(self, name))

    def as_dict(self) -> dict:
        return asdict(self)


def summarize_rates(rates: Iterable[float], cross_component: int = 0) -> GraphSummary:
    """Summarize raw pair rates. Positives are strictly ``k > 0``."""
    k = np.sort(np.asarray(list(rates) if not isinstance(rates, np.ndarray) else rates, dtype=float))
    # sorting first keeps the sums independent of the order pairs were produced in
    valid = k.shape[0]
    pos = k[k > 0.0]
    npos = pos.shape[0]
    if npos == 0:
        return GraphSummary(0.0, 0.0, 0.0, 0.0, valid, 0, cross_component)
    mean = math.fsum(pos) / npos
    std = 0.0
    if npos > 1:
        std = math.sqrt(math.fsum((pos - mean) ** 2) / (npos - 1))
    return GraphSummary(npos / valid, mean, std, float(pos[-1]), valid, npos, cross_component)


def summarize(rates: Sequence[PairDecay] | DecayMatrix) -> GraphSummary:
    """The four statistics over one graph's pair rates.

    Accepts either a list of :class:`PairDecay` or a whole :class:`DecayMatrix`;
    the latter also records how many cross-component pairs were left out.
    """
    if isinstance(rates, DecayMatrix):
        n = rates.num_nodes
        same = rates.components.label[:, None] == rates.components.label[None, :]
        cross = int(n * n - same.sum())
        return summarize_rates(rates.valid_rates(), cross)
    return summarize_rates([p.k for p in rates])


def _band(x: float, low: float, high: float, names: tuple[str, str, str]) -> str:
    if x < low:
        return names[0]
    if x > high:
        return names[2]
    return names[1]


def half_life(k: float) -> float:
    return math.log(2.0) / k if k > 0 else math.inf


def categorize(s: GraphSummary | DatasetSummary) -> CategoryLabels:
    strength = ("weak", "moderate", "strong")
    return CategoryLabels(
        prevalence=_band(s.prevalence, PREVALENCE_LOW, PREVALENCE_HIGH, ("small", "moderate", "large")),
        intensity=_band(s.intensity, RATE_LOW, RATE_HIGH, strength),
        variability=_band(s.variability, RATE_LOW, RATE_HIGH, ("low", "moderate", "high")),
        extremity=_band(s.extremity, RATE_LOW, RATE_HIGH, strength),
        intensity_half_life=half_life(s.intensity),
        extremity_half_life=half_life(s.extremity),
    )


def dataset_summary(summaries: Sequence[GraphSummary]) -> DatasetSummary:
    """Mean of each statistic over graphs that have at least one valid pair.

    Raises:
        ValueError: on empty input or when no graph is measurable.
    """
    if not summaries:
        raise ValueError("no graph summaries")
    counted = [s for s in summaries if s.measurable]
    if not counted:
        raise ValueError("no graph has a measurable pair")
    means = {m: math.fsum(s.metric(m) for s in counted) / len(counted) for m in METRICS}
    return DatasetSummary(**means, graphs_counted=len(counted), graphs_skipped=len(summaries) - len(counted))
