"""Command-line entry point: ``nice-ed <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dataset as ds
from .config import PipelineConfig, build_config, read_config_file
from .errors import NiceError
from .evaluation import (
    SweepGrid,
    grid_search,
    micro_f1,
    overshadow_analysis,
    sweep_csv,
)
from .ice import TRACE_HEADER, trace_lines
from .linkgraph import load_graph_files, load_snapshot, read_type_dict, save_snapshot
from .pipeline import predictions_from, run_corpus
from .relatedness import Aggregation, Measure, PairCache
from .scoring import Fallback


def _add_config_flags(p):
    g = p.add_argument_group("pipeline configuration")
    g.add_argument("--config", help="key=value file; command-line flags override it")
    g.add_argument("--alpha", type=float, help="coherence weight; input weight is 1 - alpha")
    g.add_argument("--weights", help="coherence,input[,prior] weights summing to 1")
    g.add_argument("--filter-threshold", type=float, help="type-filter confidence threshold (-1 disables)")
    g.add_argument("--filter-k", type=int, help="number of top predicted types kept")
    g.add_argument("--no-filter", action="store_true", default=None, help="disable type filtering")
    g.add_argument("--measure", choices=[m.value for m in Measure])
    g.add_argument("--aggregation", choices=[a.value for a in Aggregation])
    g.add_argument("--fallback", choices=[f.value for f in Fallback])
    g.add_argument("--parallelism", type=int, help="worker processes (documents run in parallel)")


def _config_from_args(args) -> PipelineConfig:
    settings = read_config_file(args.config) if getattr(args, "config", None) else {}
    flags = {
        "alpha": args.alpha,
        "weights": args.weights,
        "filter_threshold": args.filter_threshold,
        "filter_k": args.filter_k,
        "filter": False if args.no_filter else None,
        "measure": args.measure,
        "aggregation": args.aggregation,
        "fallback": args.fallback,
        "parallelism": args.parallelism,
    }
    # a flag-level alpha must beat file-level weights
    if args.alpha is not None and args.weights is None:
        settings.pop("weights", None)
    settings.update({k: v for k, v in flags.items() if v is not None})
    return build_config(settings)


def _load_graph(path):
    if not Path(path).exists():
        raise FileNotFoundError(f"graph file not found: {path}")
    return load_snapshot(path)


def _load_types(args, graph):
    types = graph.type_dict()
    if getattr(args, "typedict", None):
        types.update(read_type_dict(args.typedict))
    return types


def _write_or_print(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_build_graph(args):
    g = load_graph_files(args.edges, args.metadata, args.total_pages)
    save_snapshot(g, args.out)
    print(f"entities: {len(g)}")
    print(f"total_pages (W): {g.total_pages}")
    return 0


def cmd_disambiguate(args):
    cfg = _config_from_args(args)
    graph = _load_graph(args.graph)
    types = _load_types(args, graph)
    data = ds.load_dataset(args.dataset)
    results = run_corpus(data.documents, graph, types, cfg)
    preds = predictions_from(data.documents, results, all_mentions=args.all_mentions)
    _write_or_print(ds.format_predictions(preds), args.out)
    if args.trace:
        lines = [TRACE_HEADER]
        for doc in sorted(data.documents, key=lambda d: d.doc_id):
            lines.extend(trace_lines(doc.doc_id, results[doc.doc_id]))
        Path(args.trace).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def cmd_evaluate(args):
    report = micro_f1(ds.read_predictions(args.predictions), ds.load_dataset(args.dataset))
    if args.json:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(report.to_text())
    return 0


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _names(text, enum_cls):
    return tuple(enum_cls(x.strip()) for x in text.split(",") if x.strip())


def cmd_tune(args):
    base = _config_from_args(args)
    graph = _load_graph(args.graph)
    types = _load_types(args, graph)
    dev = ds.load_dataset(args.dataset)
    default = SweepGrid()
    grid = SweepGrid(
        alphas=_floats(args.alphas) if args.alphas else default.alphas,
        thresholds=_floats(args.thresholds) if args.thresholds else default.thresholds,
        measures=_names(args.measures, Measure) if args.measures else default.measures,
        aggregations=_names(args.aggregations, Aggregation) if args.aggregations else default.aggregations,
    )
    best, rows = grid_search(dev, grid, graph, types, base, parallelism=base.parallelism)
    if args.table_out:
        _write_or_print(sweep_csv(rows), args.table_out)
    top = max(r.micro_f1 for r in rows)
    summary = {
        "alpha": best.weights.a_coherence,
        "threshold": best.filter.t,
        "measure": best.measure.value,
        "aggregation": best.aggregation.value,
        "micro_f1": top,
        "cells": len(rows),
    }
    if args.json:
        print(json.dumps(summary, indent=2, sort_keys=True))
    else:
        for k, v in summary.items():
            print(f"{k:<12} {v}")
    return 0


def cmd_analyze_overshadowing(args):
    report = overshadow_analysis(
        ds.read_predictions(args.preds_top),
        ds.read_predictions(args.preds_shadow),
        ds.load_dataset(args.ds_top),
        ds.load_dataset(args.ds_shadow),
    )
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.to_text(args.label))
    return 0


def cmd_relatedness(args):
    graph = _load_graph(args.graph)
    cache = PairCache(graph)
    measure = Measure(args.measure)
    if args.pairs:
        out = []
        for line_no, raw in enumerate(Path(args.pairs).read_text(encoding="utf-8").splitlines(), start=1):
            if not raw.strip() or raw.startswith("#"):
                continue
            cols = raw.split("\t")
            try:
                e1, e2 = int(cols[0]), int(cols[1])
            except (ValueError, IndexError):
                raise NiceError(f"{args.pairs}: line {line_no}: expected two integer ids") from None
            out.append(f"{raw}\t{cache.get(measure, e1, e2)!r}\n")
        _write_or_print("".join(out), args.out)
    else:
        if args.e1 is None or args.e2 is None:
            raise NiceError("either --pairs or both --e1 and --e2 are required")
        print(repr(cache.get(measure, args.e1, args.e2)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nice-ed", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-graph", help="build a graph snapshot from TSV files")
    p.add_argument("edges", help="source_id<TAB>target_id edge file")
    p.add_argument("--metadata", help="id<TAB>title<TAB>type file")
    p.add_argument("--out", required=True, help="snapshot output path")
    p.add_argument("--total-pages", type=int, help="override the page-universe size W")
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("disambiguate", help="run the pipeline over a dataset")
    p.add_argument("dataset")
    p.add_argument("--graph", required=True)
    p.add_argument("--typedict", help="entity_id<TAB>type_label file")
    p.add_argument("--out", help="predictions TSV (default: stdout)")
    p.add_argument("--trace", metavar="PATH", help="write a per-step TSV trace")
    p.add_argument("--all-mentions", action="store_true", help="also emit auxiliary mentions")
    _add_config_flags(p)
    p.set_defaults(func=cmd_disambiguate)

    p = sub.add_parser("evaluate", help="micro-F1 of a predictions file")
    p.add_argument("predictions")
    p.add_argument("dataset")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("tune", help="grid search over alpha, threshold, measure, aggregation")
    p.add_argument("dataset", help="development dataset")
    p.add_argument("--graph", required=True)
    p.add_argument("--typedict")
    p.add_argument("--alphas", help="comma-separated (default 0,0.1,...,1)")
    p.add_argument("--thresholds", help="comma-separated (default -1,0.5,...,1)")
    p.add_argument("--measures", help="comma-separated measure names")
    p.add_argument("--aggregations", help="comma-separated aggregation names")
    p.add_argument("--table-out", help="write the sweep table CSV here")
    p.add_argument("--json", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("analyze-overshadowing", help="compare paired Top/Shadow predictions")
    p.add_argument("preds_top")
    p.add_argument("preds_shadow")
    p.add_argument("ds_top")
    p.add_argument("ds_shadow")
    p.add_argument("--label", default="system")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze_overshadowing)

    p = sub.add_parser("relatedness", help="relatedness of entity pairs")
    p.add_argument("--graph", required=True)
    p.add_argument("--measure", default=Measure.MILNE_WITTEN.value, choices=[m.value for m in Measure])
    p.add_argument("--e1", type=int)
    p.add_argument("--e2", type=int)
    p.add_argument("--pairs", help="TSV of id pairs; a score column is appended")
    p.add_argument("--out")
    p.set_defaults(func=cmd_relatedness)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (OSError, ValueError) as exc:
        print(f"error: [{args.command}] {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
