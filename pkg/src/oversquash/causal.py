"""Treatment effects of rewiring on over-squashing and their significance."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .decay import DecayMatrix
from .metrics import METRICS, GraphSummary
from .special import average_ranks, chi_square_sf_df1, student_t_two_tailed

DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class TreatmentEffectSet:
    graph_id: int | str
    prevalence: float
    intensity: float
    variability: float
    extremity: float

    def metric(self, name: str) -> float:
        return float(getattr(self, name))


@dataclass(frozen=True)
class AteReport:
    metric: str
    ate: float
    std: float
    n: int
    t: float | None
    p: float
    significant: bool = False
    degenerate: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PairedReport:
    test: str
    statistic: float | None
    p: float
    n_pairs: int
    b: int | None = None
    c: int | None = None
    flag: str | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class SpearmanResult:
    rho: float | None
    p: float | None
    n: int
    defined: bool = True

    def as_dict(self) -> dict:
        return asdict(self)


def ite(before: GraphSummary, after: GraphSummary, graph_id: int | str = 0,
        after_id: int | str | None = None) -> TreatmentEffectSet:
    """Per-graph effect ``after - before`` for each metric.

    Raises:
        ValueError: if ``after_id`` is given and differs from ``graph_id``.
    """
    if after_id is not None and after_id != graph_id:
        raise ValueError(f"graph id mismatch: {graph_id!r} vs {after_id!r}")
    return TreatmentEffectSet(graph_id, **{m: after.metric(m) - before.metric(m) for m in METRICS})


def _one_sample_t(values: Sequence[float]) -> tuple[float, float, float | None, float, bool]:
    n = len(values)
    if n < 2:
        raise ValueError(f"need at least 2 values, got {n}")
    if all(x == values[0] for x in values):
        mean, std = float(values[0]), 0.0
    else:
        mean = math.fsum(values) / n
        std = math.sqrt(math.fsum((x - mean) ** 2 for x in values) / (n - 1))
    if std == 0.0:
        if mean == 0.0:
            return mean, std, 0.0, 1.0, False
        return mean, std, None, 0.0, True
    t = mean / (std / math.sqrt(n))
    return mean, std, t, student_t_two_tailed(t, n - 1).p, False


def ate(ites: Sequence[TreatmentEffectSet], metric: str, alpha: float = DEFAULT_ALPHA,
        num_tests: int = len(METRICS)) -> AteReport:
    """Mean effect over graphs with a two-tailed one-sample t-test against zero."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    values = [e.metric(metric) for e in ites]
    mean, std, t, p, degenerate = _one_sample_t(values)
    return AteReport(metric, mean, std, len(values), t, p, p < alpha / num_tests, degenerate)


def ate_all(ites: Sequence[TreatmentEffectSet], alpha: float = DEFAULT_ALPHA) -> dict[str, AteReport]:
    return {m: ate(ites, m, alpha) for m in METRICS}


def bonferroni(ps: Sequence[float], alpha: float = DEFAULT_ALPHA) -> list[bool]:
    """Significance flags at family-wise level ``alpha`` over ``len(ps)`` tests."""
    threshold = alpha / len(ps)
    return [p < threshold for p in ps]


def mcnemar(before_flags: Sequence[bool], after_flags: Sequence[bool]) -> PairedReport:
    """McNemar's test on paired binary outcomes, no continuity correction.

    ``b`` counts pairs over-squashed before but not after, ``c`` the reverse.
    """
    before = np.asarray(before_flags, dtype=bool)
    after = np.asarray(after_flags, dtype=bool)
    if before.shape != after.shape:
        raise ValueError("flag vectors are not aligned")
    b = int(np.count_nonzero(before & ~after))
    c = int(np.count_nonzero(~before & after))
    if b + c == 0:
        return PairedReport("mcnemar", None, 1.0, int(before.size), b, c, "no discordant pairs")
    stat = (b - c) ** 2 / (b + c)
    return PairedReport("mcnemar", stat, chi_square_sf_df1(stat).p, int(before.size), b, c)


def paired_t(before_k: Sequence[float], after_k: Sequence[float]) -> PairedReport:
    """Two-tailed paired t-test on ``after - before``."""
    if len(before_k) != len(after_k):
        raise ValueError("rate vectors are not aligned")
    diffs = [float(a) - float(b) for a, b in zip(after_k, before_k)]
    _, std, t, p, _ = _one_sample_t(diffs)
    flag = "zero variance" if std == 0.0 else None
    return PairedReport("paired_t", t, p, len(diffs), flag=flag)


def responsiveness(avg_effect: float, baseline: float) -> float | None:
    """Effect as a percentage of the pre-treatment value; ``None`` when the baseline is zero."""
    if baseline == 0:
        return None
    if baseline < 0:
        raise ValueError("baseline must be nonnegative")
    return 100.0 * avg_effect / baseline


def spearman(x: Sequence[float], y: Sequence[float]) -> SpearmanResult:
    """Rank correlation with average ranks for ties and a t-approximation p-value."""
    n = len(x)
    if n != len(y):
        raise ValueError("inputs differ in length")
    if n < 3:
        raise ValueError(f"need at least 3 observations, got {n}")
    rx = average_ranks(list(x))
    ry = average_ranks(list(y))
    mx = math.fsum(rx) / n
    my = math.fsum(ry) / n
    sxx = math.fsum((a - mx) ** 2 for a in rx)
    syy = math.fsum((b - my) ** 2 for b in ry)
    if sxx == 0.0 or syy == 0.0:
        return SpearmanResult(None, None, n, defined=False)
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(rx, ry))
    rho = max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    if abs(rho) == 1.0:
        return SpearmanResult(rho, 0.0, n)
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return SpearmanResult(rho, student_t_two_tailed(t, n - 2).p, n)


@dataclass(frozen=True)
class AlignedPairs:
    """Ordered pairs valid (same component) both before and after treatment."""

    before_k: np.ndarray
    after_k: np.ndarray
    churned: int = 0
    targets: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    sources: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def before_flags(self) -> np.ndarray:
        return self.before_k > 0.0

    @property
    def after_flags(self) -> np.ndarray:
        return self.after_k > 0.0


def align_pairs(before: DecayMatrix, after: DecayMatrix) -> AlignedPairs:
    """Match pair rates across conditions; count pairs valid in only one of them."""
    if before.num_nodes != after.num_nodes:
        raise ValueError("node sets differ between conditions")
    both = before.valid & after.valid
    churned = int(np.count_nonzero(before.valid ^ after.valid))
    tv, su = np.nonzero(both)
    return AlignedPairs(before.k[both], after.k[both], churned, tv, su)


def node_task_tests(before: DecayMatrix, after: DecayMatrix) -> tuple[PairedReport, PairedReport, AlignedPairs]:
    aligned = align_pairs(before, after)
    return (
        mcnemar(aligned.before_flags, aligned.after_flags),
        paired_t(aligned.before_k, aligned.after_k),
        aligned,
    )
