"""Readers and writers: TUDataset bundles, edge lists, CSV inputs and JSON reports."""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .graph import Graph, GraphError, build_graph, connected_components, induced_subgraph

_HEADER = re.compile(r"^#\s*nodes\s*:\s*(\d+)\s*$", re.IGNORECASE)


class FormatError(ValueError):
    """Raised for unreadable or inconsistent input files."""


@dataclass(frozen=True)
class DatasetBundle:
    name: str
    graphs: list[Graph]
    source: str

    def __post_init__(self):
        if not self.graphs:
            raise FormatError(f"{self.name}: bundle holds no graphs")


# -- edge lists -----------------------------------------------------------------


def parse_edge_list(text: str, name: str = "<string>") -> tuple[int | None, list[tuple[int, int]]]:
    """Parse ``u v`` lines (0-based) and an optional ``# nodes: N`` header."""
    header_n = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER.match(line)
            if m:
                header_n = int(m.group(1))
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise FormatError(f"{name}:{lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"{name}:{lineno}: non-integer node id in {raw!r}") from None
        if u < 0 or v < 0:
            raise FormatError(f"{name}:{lineno}: negative node id in {raw!r}")
        edges.append((u, v))
    return header_n, edges


def load_edge_list(path: str | Path) -> Graph:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    header_n, edges = parse_edge_list(text, str(path))
    n = header_n if header_n is not None else max((max(e) for e in edges), default=-1) + 1
    try:
        return build_graph(n, edges)
    except GraphError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def format_edge_list(g: Graph) -> str:
    lines = [f"# nodes: {g.num_nodes}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g))


# -- TUDataset ------------------------------------------------------------------


def _read_int_rows(path: Path, width: int) -> list[list[int]]:
    if not path.is_file():
        raise FormatError(f"missing file {path}")
    rows = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = [p for p in re.split(r"[,\s]+", line) if p]
        if len(parts) != width:
            raise FormatError(f"{path}:{lineno}: expected {width} value(s), got {raw!r}")
        try:
            rows.append([int(p) for p in parts])
        except ValueError:
            raise FormatError(f"{path}:{lineno}: non-numeric value in {raw!r}") from None
    return rows


def load_tudataset(directory: str | Path, name: str) -> DatasetBundle:
    """Read ``<name>_A.txt`` and ``<name>_graph_indicator.txt``; labels are ignored."""
    directory = Path(directory)
    indicator = [r[0] for r in _read_int_rows(directory / f"{name}_graph_indicator.txt", 1)]
    edges = _read_int_rows(directory / f"{name}_A.txt", 2)
    if not indicator:
        raise FormatError(f"{name}: empty graph indicator")
    ind = np.asarray(indicator, dtype=np.int64)
    graph_ids = np.unique(ind)
    local = np.empty_like(ind)
    sizes: dict[int, int] = {}
    for node, gid in enumerate(ind.tolist()):
        local[node] = sizes.get(gid, 0)
        sizes[gid] = local[node] + 1
    per_graph: dict[int, list[tuple[int, int]]] = {int(gid): [] for gid in graph_ids}
    total = ind.shape[0]
    for lineno, (i, j) in enumerate(edges, start=1):
        if not (1 <= i <= total and 1 <= j <= total):
            raise FormatError(f"{name}_A.txt:{lineno}: node id out of range 1..{total}")
        gi, gj = int(ind[i - 1]), int(ind[j - 1])
        if gi != gj:
            raise FormatError(
                f"{name}_A.txt:{lineno}: edge ({i}, {j}) crosses graphs {gi} and {gj}"
            )
        per_graph[gi].append((int(local[i - 1]), int(local[j - 1])))
    graphs = [build_graph(sizes[int(gid)], per_graph[int(gid)]) for gid in graph_ids]
    return DatasetBundle(name, graphs, str(directory))


def write_tudataset(bundle: DatasetBundle, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    a_lines, ind_lines = [], []
    offset = 0
    for gid, g in enumerate(bundle.graphs, start=1):
        ind_lines.extend([str(gid)] * g.num_nodes)
        for u, v in g.edges:
            a_lines.append(f"{u + offset + 1}, {v + offset + 1}")
            a_lines.append(f"{v + offset + 1}, {u + offset + 1}")
        offset += g.num_nodes
    (directory / f"{bundle.name}_A.txt").write_text("\n".join(a_lines) + "\n")
    (directory / f"{bundle.name}_graph_indicator.txt").write_text("\n".join(ind_lines) + "\n")


def load_dataset(path: str | Path, fmt: str, name: str | None = None) -> DatasetBundle:
    """Load either a TUDataset directory or one edge-list file / a directory of them."""
    path = Path(path)
    if fmt == "tudataset":
        if name is None:
            found = sorted(path.glob("*_graph_indicator.txt"))
            if len(found) != 1:
                raise FormatError(f"{path}: cannot infer the dataset name; pass --name")
            name = found[0].name[: -len("_graph_indicator.txt")]
        return load_tudataset(path, name)
    if fmt == "edgelist":
        if path.is_dir():
            files = sorted(p for p in path.iterdir() if p.suffix in (".txt", ".edges", ".edgelist"))
            if not files:
                raise FormatError(f"{path}: no edge-list files")
            return DatasetBundle(name or path.name, [load_edge_list(f) for f in files], str(path))
        return DatasetBundle(name or path.stem, [load_edge_list(path)], str(path))
    raise FormatError(f"unknown format {fmt!r}")


def largest_connected_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the largest component and the old id of each new node.

    Size ties go to the component holding the smallest node id.
    """
    comps = connected_components(g)
    if comps.num_components <= 1:
        return g, np.arange(g.num_nodes, dtype=np.int64)
    c = int(np.argmax(comps.sizes))
    return induced_subgraph(g, comps.members(c))


# -- CSV inputs -------------------------------------------------------------------


def read_keyed_csv(path: str | Path, key: str, columns: Sequence[str]) -> dict[str, dict[str, float]]:
    """Rows of a headed CSV keyed by ``key``, with ``columns`` parsed as floats."""
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    out: dict[str, dict[str, float]] = {}
    with fh:
        reader = csv.DictReader(fh)
        missing = [c for c in (key, *columns) if c not in (reader.fieldnames or [])]
        if missing:
            raise FormatError(f"{path}: missing column(s) {missing}")
        for lineno, row in enumerate(reader, start=2):
            k = row[key].strip()
            if k in out:
                raise FormatError(f"{path}:{lineno}: duplicate {key} {k!r}")
            try:
                out[k] = {c: float(row[c]) for c in columns}
            except (TypeError, ValueError):
                raise FormatError(f"{path}:{lineno}: non-numeric value") from None
    return out


def read_gains_csv(path: str | Path) -> dict[str, float]:
    return {k: v["gain_percent"] for k, v in read_keyed_csv(path, "config_id", ["gain_percent"]).items()}


# -- reports ----------------------------------------------------------------------


def _clean(obj: Any) -> Any:
    # JSON has no infinities; non-finite numbers are written as null
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass
class Report:
    command: str
    inputs: dict[str, Any]
    graphs: list[dict[str, Any]] = field(default_factory=list)
    dataset: dict[str, Any] | None = None
    causal: dict[str, Any] | None = None
    extra: dict[str, Any] = field(default_factory=dict)
    version: str = __version__

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"tool": "oversquash", "version": self.version, "command": self.command,
                             "inputs": self.inputs}
        if self.graphs:
            d["graphs"] = self.graphs
        if self.dataset:
            d["dataset"] = self.dataset
        if self.causal:
            d["causal"] = self.causal
        d.update(self.extra)
        return _clean(d)


def dumps_report(r: Report) -> str:
    return json.dumps(r.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(r: Report, path: str | Path) -> None:
    text = dumps_report(r)
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc}") from exc


def read_report(path: str | Path) -> dict[str, Any]:
    return json.loads(Path(path).read_text())
