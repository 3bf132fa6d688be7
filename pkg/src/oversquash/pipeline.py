"""Per-graph measurement and control/treated comparison used by the CLI."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

from . import causal
from .decay import DecayMatrix, decay_matrix
from .graph import Graph, NoMeasurablePairs, connected_components, diameter
from .metrics import METRICS, GraphSummary, categorize, dataset_summary, summarize

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class Measurement:
    graph: Graph
    summary: GraphSummary
    decay: DecayMatrix | None
    num_components: int
    diameter: int

    @property
    def measurable(self) -> bool:
        return self.decay is not None and self.summary.measurable

    def record(self, index: int) -> dict:
        s = self.summary
        rec = {
            "index": index,
            "n": self.graph.num_nodes,
            "m": self.graph.num_edges,
            "components": self.num_components,
            "diameter": self.diameter,
            "measurable": self.measurable,
            "self_loops_dropped": self.graph.self_loops_dropped,
            **s.as_dict(),
        }
        if self.measurable:
            rec["categories"] = categorize(s).as_dict()
            rec["layer_range"] = [self.decay.layers.start, self.decay.layers.end]
        return rec


def measure(g: Graph) -> Measurement:
    comps = connected_components(g)
    d = diameter(g, comps).value
    n = g.num_nodes
    cross = n * n - sum(s * s for s in comps.sizes)
    try:
        dm = decay_matrix(g)
    except NoMeasurablePairs:
        return Measurement(g, GraphSummary(0.0, 0.0, 0.0, 0.0, 0, 0, cross), None, comps.num_components, d)
    return Measurement(g, summarize(dm), dm, comps.num_components, d)


def ordered_map(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """``map`` with an optional thread pool; results keep input order."""
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def measure_all(graphs: Sequence[Graph], threads: int = 1) -> list[Measurement]:
    return ordered_map(measure, graphs, threads)


def dataset_record(ms: Sequence[Measurement]) -> dict:
    ds = dataset_summary([m.summary for m in ms])
    return {**ds.as_dict(), "categories": categorize(ds).as_dict()}


@dataclass(frozen=True)
class CausalResult:
    ites: list[causal.TreatmentEffectSet]
    skipped: list[int]
    ates: dict[str, causal.AteReport] | None
    mcnemar: causal.PairedReport | None = None
    paired_t: causal.PairedReport | None = None
    churned_pairs: int = 0
    aligned_pairs: int = 0

    def to_dict(self) -> dict:
        d: dict = {
            "graphs_compared": len(self.ites),
            "graphs_skipped": self.skipped,
            "ite": [
                {"graph": e.graph_id, **{m: e.metric(m) for m in METRICS}} for e in self.ites
            ],
        }
        if self.ates is not None:
            d["ate"] = {m: r.as_dict() for m, r in self.ates.items()}
        if self.mcnemar is not None:
            d["mcnemar"] = self.mcnemar.as_dict()
            d["paired_t"] = self.paired_t.as_dict()
            d["aligned_pairs"] = self.aligned_pairs
            d["churned_pairs"] = self.churned_pairs
        return d


def compare(control: Sequence[Measurement], treated: Sequence[Measurement], task: str = "graph",
            alpha: float = causal.DEFAULT_ALPHA) -> CausalResult:
    """Effects of treatment per graph, then dataset-level or pair-level tests.

    Graphs without measurable pairs in either condition are skipped.
    """
    if len(control) != len(treated):
        raise ValueError(f"control has {len(control)} graphs, treated has {len(treated)}")
    ites, skipped = [], []
    for i, (c, t) in enumerate(zip(control, treated)):
        if c.graph.num_nodes != t.graph.num_nodes:
            raise ValueError(f"graph {i}: node count changed from {c.graph.num_nodes} to {t.graph.num_nodes}")
        if c.measurable and t.measurable:
            ites.append(causal.ite(c.summary, t.summary, i))
        else:
            skipped.append(i)
    if task == "graph":
        if len(ites) < 2:
            raise ValueError("graph-level tests need at least two measurable graphs")
        return CausalResult(ites, skipped, causal.ate_all(ites, alpha))
    if task != "node":
        raise ValueError(f"unknown task {task!r}")
    before_k, after_k, churned = [], [], 0
    for i, (c, t) in enumerate(zip(control, treated)):
        if i in skipped:
            continue
        aligned = causal.align_pairs(c.decay, t.decay)
        before_k.extend(aligned.before_k.tolist())
        after_k.extend(aligned.after_k.tolist())
        churned += aligned.churned
    mc = causal.mcnemar([k > 0 for k in before_k], [k > 0 for k in after_k])
    pt = causal.paired_t(before_k, after_k)
    ates = causal.ate_all(ites, alpha) if len(ites) >= 2 else None
    return CausalResult(ites, skipped, ates, mc, pt, churned, len(before_k))


def responsiveness_table(ates: dict[str, causal.AteReport], baseline: dict) -> dict[str, float | None]:
    return {m: causal.responsiveness(ates[m].ate, baseline[m]) for m in METRICS}


def aggregate_ates(per_config: Sequence[dict[str, float]]) -> dict[str, float]:
    """Unweighted mean of configuration-level ATEs per metric."""
    return {m: math.fsum(c[m] for c in per_config) / len(per_config) for m in METRICS}
