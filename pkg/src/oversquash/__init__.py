"""Over-squashing measurement, rewiring treatments and causal effect estimation."""

__version__ = "0.1.0"

from ._backend import NAME as KERNEL_BACKEND  # noqa: E402
from .graph import Graph, build_graph, connected_components, diameter, bfs_distances  # noqa: E402
from .sensitivity import layer_range, normalized_column, column_series  # noqa: E402
from .decay import fit_decay, graph_decay_rates, decay_matrix  # noqa: E402
from .metrics import summarize, categorize, dataset_summary  # noqa: E402

__all__ = [
    "KERNEL_BACKEND",
    "Graph",
    "build_graph",
    "connected_components",
    "diameter",
    "bfs_distances",
    "layer_range",
    "normalized_column",
    "column_series",
    "fit_decay",
    "graph_decay_rates",
    "decay_matrix",
    "summarize",
    "categorize",
    "dataset_summary",
]
