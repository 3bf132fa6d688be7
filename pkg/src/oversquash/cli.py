"""Command-line interface.

Exit codes: 0 success, 2 invalid input or parameters, 3 nothing measurable.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import KERNEL_BACKEND, __version__, causal, pipeline
from .formats import (
    DatasetBundle,
    FormatError,
    Report,
    dumps_report,
    format_edge_list,
    largest_connected_component,
    load_dataset,
    read_gains_csv,
    read_keyed_csv,
)
from .graph import GraphError
from .metrics import METRICS
from .rewiring import RewireError, RewireParams, edge_accounting, rewire

logger = logging.getLogger("oversquash")

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE = 0, 2, 3

DEFAULTS: dict[str, Any] = {
    "format": "edgelist",
    "name": None,
    "lcc_only": False,
    "method": None,
    "alpha": 0.15,
    "eps": 1e-4,
    "num_edges": 1,
    "init_iters": 50,
    "seed": 0,
    "rewired": None,
    "task": "graph",
    "treated_dir": None,
    "significance": 0.05,
    "gains": None,
    "effects": None,
    "out": None,
    "out_dir": None,
    "pairs_csv": None,
    "series_csv": None,
    "effects_csv": None,
    "config_id": None,
    "csv_out": None,
    "responsiveness": False,
    "threads": 1,
    "input": None,
}


class UsageError(Exception):
    """Invalid configuration; maps to exit code 2."""


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file with option values; flags take precedence")
    common.add_argument("--input", help="control dataset: TUDataset dir, edge-list file or dir of edge lists")
    common.add_argument("--format", choices=["tudataset", "edgelist"])
    common.add_argument("--name", help="TUDataset name (inferred when the directory holds one)")
    common.add_argument("--lcc-only", action="store_true", default=None,
                        help="keep only each graph's largest connected component")
    common.add_argument("--out", help="output JSON report (stdout when omitted)")
    common.add_argument("--threads", type=int, help="worker threads across graphs")
    common.add_argument("-v", "--verbose", action="store_true")

    rw = argparse.ArgumentParser(add_help=False)
    rw.add_argument("--method", choices=["digl", "gtr", "fosr", "import"])
    rw.add_argument("--alpha", type=float, help="teleport probability (digl)")
    rw.add_argument("--eps", type=float, help="sparsification threshold (digl)")
    rw.add_argument("--num-edges", type=int, help="edges to add (gtr, fosr)")
    rw.add_argument("--init-iters", type=int, help="initial power iterations (fosr)")
    rw.add_argument("--seed", type=int, help="initialization seed (fosr)")
    rw.add_argument("--rewired", help="edge-list file or directory to import (import)")

    p = argparse.ArgumentParser(
        prog="oversquash", description="Measure over-squashing in graph datasets and how rewiring changes it.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__} (kernels: {KERNEL_BACKEND})")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", parents=[common], help="over-squashing statistics per graph and dataset")
    m.add_argument("--pairs-csv", help="write every pair rate (u, v, k, ln_n0)")
    m.add_argument("--series-csv", help="write every sensitivity value (v, u, ell, jtilde)")

    r = sub.add_parser("rewire", parents=[common, rw], help="apply a rewiring treatment")
    r.add_argument("--out-dir", help="directory for the rewired edge lists")

    c = sub.add_parser("causal", parents=[common, rw], help="treatment effects of rewiring")
    c.add_argument("--task", choices=["graph", "node"])
    c.add_argument("--treated-dir", help="already-rewired dataset in --format, instead of --method")
    c.add_argument("--significance", type=float, help="family-wise alpha (default 0.05)")
    c.add_argument("--responsiveness", action="store_true", default=None,
                   help="report ATEs as a percentage of the control dataset means")
    c.add_argument("--effects-csv", help="append this run's ATEs as one row of an effects CSV")
    c.add_argument("--config-id", help="row key for --effects-csv")

    k = sub.add_parser("correlate", parents=[common], help="Spearman correlation of effects and gains")
    k.add_argument("--effects", help="CSV: config_id, prevalence, intensity, variability, extremity")
    k.add_argument("--gains", help="CSV: config_id, gain_percent")
    k.add_argument("--csv-out", help="also write the coefficients as CSV")
    return p


def resolve_config(argv: Sequence[str] | None) -> argparse.Namespace:
    """Parse flags, then fill unset options from ``--config`` and finally from defaults."""
    args = _parser().parse_args(argv)
    file_values: dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config, "rb") as fh:
                raw = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        file_values = {k.replace("-", "_"): v for k, v in raw.items()}
        unknown = sorted(set(file_values) - set(DEFAULTS))
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
    for key, default in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, file_values.get(key, default))
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    if args.input is None and args.command != "correlate":
        raise UsageError("--input is required")
    for key in ("out", "pairs_csv", "series_csv", "effects_csv", "csv_out"):
        target = getattr(args, key, None)
        if target and not Path(target).resolve().parent.is_dir():
            raise UsageError(f"output directory for {target} does not exist")
    return args


def _rewire_params(args) -> RewireParams:
    if args.method is None:
        raise UsageError("--method is required")
    params = RewireParams(
        method=args.method, alpha=args.alpha, eps=args.eps, num_edges=args.num_edges,
        init_iters=args.init_iters, seed=args.seed, path=args.rewired,
    )
    params.validate()
    return params


def _load(args, path=None) -> DatasetBundle:
    bundle = load_dataset(path or args.input, args.format, args.name)
    if args.lcc_only:
        graphs = [largest_connected_component(g)[0] for g in bundle.graphs]
        bundle = DatasetBundle(bundle.name, graphs, bundle.source)
    return bundle


def _import_paths(args, count: int) -> list[Path]:
    src = Path(args.rewired)
    if src.is_dir():
        files = sorted(p for p in src.iterdir() if p.suffix in (".txt", ".edges", ".edgelist"))
    else:
        files = [src]
    if len(files) != count:
        raise UsageError(f"--rewired provides {len(files)} graph(s) for {count} input graph(s)")
    return files


def _treat(bundle: DatasetBundle, params: RewireParams, args) -> list:
    if params.method == "import":
        paths = _import_paths(args, len(bundle.graphs))
        pairs = [(g, RewireParams("import", path=str(p))) for g, p in zip(bundle.graphs, paths)]
    else:
        pairs = [(g, params) for g in bundle.graphs]
    return pipeline.ordered_map(lambda gp: rewire(*gp), pairs, args.threads)


def _inputs(args, **extra) -> dict:
    d = {"input": str(args.input), "format": args.format, "lcc_only": bool(args.lcc_only)}
    d.update({k: v for k, v in extra.items() if v is not None})
    return d


def _emit(report: Report, args) -> None:
    text = dumps_report(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_measure(args) -> int:
    bundle = _load(args)
    ms = pipeline.measure_all(bundle.graphs, args.threads)
    if not any(m.measurable for m in ms):
        logger.error("no graph has a measurable pair")
        return EXIT_DEGENERATE
    report = Report(
        "measure",
        _inputs(args, name=bundle.name),
        graphs=[m.record(i) for i, m in enumerate(ms)],
        dataset=pipeline.dataset_record(ms),
    )
    if args.pairs_csv:
        _write_pairs(ms, args.pairs_csv)
    if args.series_csv:
        _write_series(ms, args.series_csv)
    _emit(report, args)
    return EXIT_OK


def _write_pairs(ms, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["graph", "u", "v", "k", "ln_n0"])
        for i, m in enumerate(ms):
            if m.decay is None:
                continue
            for pd in m.decay.pairs():
                w.writerow([i, pd.source, pd.target, format(pd.fit.k, ".17g"), format(pd.fit.ln_n0, ".17g")])


def _write_series(ms, path) -> None:
    from .sensitivity import write_series_csv

    with open(path, "w", newline="") as fh:
        fh.write("graph,v,u,ell,jtilde\n")
        for i, m in enumerate(ms):
            if m.decay is None:
                continue
            buf = io.StringIO()
            write_series_csv(m.graph, m.decay.layers, buf)
            for line in buf.getvalue().splitlines()[1:]:
                fh.write(f"{i},{line}\n")


def cmd_rewire(args) -> int:
    params = _rewire_params(args)
    bundle = _load(args)
    treated = _treat(bundle, params, args)
    acc = [edge_accounting(g, h) for g, h in zip(bundle.graphs, treated)]
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        width = max(5, len(str(len(treated))))
        for i, h in enumerate(treated):
            (out_dir / f"graph_{i:0{width}d}.txt").write_text(format_edge_list(h))
    n = len(acc)
    report = Report(
        "rewire",
        _inputs(args, name=bundle.name, params=_params_dict(params)),
        graphs=[{"index": i, "m_before": g.num_edges, "m_after": h.num_edges, **a.as_dict()}
                for i, (g, h, a) in enumerate(zip(bundle.graphs, treated, acc))],
        dataset={
            "graphs": n,
            "mean_added": sum(a.added for a in acc) / n,
            "mean_removed": sum(a.removed for a in acc) / n,
            "mean_net": sum(a.net for a in acc) / n,
        },
    )
    _emit(report, args)
    return EXIT_OK


def _params_dict(p: RewireParams) -> dict:
    keys = {"digl": ("alpha", "eps"), "gtr": ("num_edges",), "fosr": ("num_edges", "init_iters", "seed"),
            "import": ("path",)}[p.method]
    return {"method": p.method, **{k: getattr(p, k) for k in keys}}


def cmd_causal(args) -> int:
    if (args.method is None) == (args.treated_dir is None):
        raise UsageError("give exactly one of --method or --treated-dir")
    if args.effects_csv and not args.config_id:
        raise UsageError("--effects-csv needs --config-id")
    params = _rewire_params(args) if args.method else None
    control = _load(args)
    if params is not None:
        treated_graphs = _treat(control, params, args)
    else:
        treated_graphs = _load(args, args.treated_dir).graphs
    if len(treated_graphs) != len(control.graphs):
        raise UsageError(f"control has {len(control.graphs)} graphs, treated has {len(treated_graphs)}")
    before = pipeline.measure_all(control.graphs, args.threads)
    after = pipeline.measure_all(treated_graphs, args.threads)
    if not any(m.measurable for m in before):
        logger.error("no control graph has a measurable pair")
        return EXIT_DEGENERATE
    try:
        result = pipeline.compare(before, after, args.task, args.significance)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    section = result.to_dict()
    section["task"] = args.task
    section["alpha"] = args.significance
    section["bonferroni_threshold"] = args.significance / len(METRICS)
    if args.responsiveness and result.ates is not None:
        baseline = pipeline.dataset_record(before)
        section["baseline"] = {m: baseline[m] for m in METRICS}
        section["responsiveness_percent"] = pipeline.responsiveness_table(result.ates, baseline)
    extra = {"treated": str(args.treated_dir)} if args.treated_dir else {"params": _params_dict(params)}
    report = Report("causal", _inputs(args, name=control.name, **extra), causal=section)
    if args.effects_csv and result.ates is not None:
        _append_effects(args.effects_csv, args.config_id, result.ates)
    _emit(report, args)
    return EXIT_OK


def _append_effects(path, config_id, ates) -> None:
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if new:
            w.writerow(["config_id", *METRICS])
        w.writerow([config_id, *(format(ates[m].ate, ".17g") for m in METRICS)])


def cmd_correlate(args) -> int:
    if not args.effects or not args.gains:
        raise UsageError("correlate needs --effects and --gains")
    effects = read_keyed_csv(args.effects, "config_id", METRICS)
    gains = read_gains_csv(args.gains)
    if set(effects) != set(gains):
        missing = sorted(set(effects) ^ set(gains))
        raise UsageError(f"config ids do not match between effects and gains: {missing}")
    ids = sorted(effects)
    y = [gains[i] for i in ids]
    rows = {}
    for m in METRICS:
        res = causal.spearman([effects[i][m] for i in ids], y)
        rows[m] = res.as_dict()
    report = Report(
        "correlate",
        {"effects": str(args.effects), "gains": str(args.gains)},
        extra={
            "spearman": rows,
            "configs": ids,
            "aggregated_ate": pipeline.aggregate_ates([effects[i] for i in ids]),
        },
    )
    if args.csv_out:
        with open(args.csv_out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["metric", "rho", "p", "n", "defined"])
            for m in METRICS:
                r = rows[m]
                w.writerow([m, _num(r["rho"]), _num(r["p"]), r["n"], r["defined"]])
    _emit(report, args)
    return EXIT_OK


def _num(x) -> str:
    return "" if x is None else format(x, ".17g")


COMMANDS = {"measure": cmd_measure, "rewire": cmd_rewire, "causal": cmd_causal, "correlate": cmd_correlate}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = resolve_config(argv)
    except UsageError as exc:
        print(f"oversquash: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, FormatError, GraphError, RewireError) as exc:
        print(f"oversquash: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
