"""The vulnscore command line: ingest | features | train | predict | serve.

Exit codes: 0 success, 1 internal error, 2 input or usage error.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__, nvd, pipeline
from .callgraph import parse_analysis_report, parse_callgraph_dot
from .errors import VulnscoreError
from .service import TriageService, TriageStore, make_server


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vulnscore",
        description="Severity assessment for vulnerabilities reported by compositional analysis",
    )
    parser.add_argument("--version", action="version", version=f"vulnscore {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="filter NVD feeds into a ground-truth file")
    p.add_argument("--nvd", nargs="+", required=True, metavar="FEED", help="NVD JSON 1.1 feed files")
    p.add_argument("--manual", help="manual annotations (ground-truth JSON format)")
    p.add_argument("--config", help="INI config with the [nvd] filter section")
    p.add_argument("--out", default="ground_truth.json", help="output ground-truth JSON")

    p = sub.add_parser("features", help="extract the feature matrix from an analysis report")
    p.add_argument("--report", required=True, help="analysis report JSON")
    p.add_argument("--graph", help="call-graph (DOT or graph JSON) when not embedded in the report")
    p.add_argument("--out", default="features.csv", help="feature matrix CSV (sidecar lands at .json)")

    p = sub.add_parser("train", help="train the per-metric classifier ensembles")
    p.add_argument("--features", nargs="+", required=True, metavar="CSV", help="feature matrix files")
    p.add_argument("--ground-truth", required=True, help="ground-truth JSON")
    p.add_argument("--algo", choices=("rf", "nb"), default="rf")
    p.add_argument("--kfolds", type=int, default=4)
    p.add_argument("--split", type=float, default=0.75, help="training fraction")
    p.add_argument("--seed", type=int, default=0, help="master seed (split + derived ensemble seeds)")
    p.add_argument("--seeds", help="10 comma-separated ensemble seeds (overrides derivation)")
    p.add_argument("--feature-mode", choices=("original7", "extended10"), default="extended10")
    p.add_argument("--model-out", default="model.json")
    p.add_argument("--metrics-out", default="metrics.json")
    p.add_argument("--jobs", type=int, default=1, help="parallel seed training (never changes outputs)")

    p = sub.add_parser("predict", help="assess vulnerable functions with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True, help="feature matrix CSV")
    p.add_argument("--ground-truth", help="known scores; matching functions keep them")
    p.add_argument("--out", default="assessment.json")

    p = sub.add_parser("serve", help="run the interactive triage service")
    p.add_argument("--assessment", required=True)
    p.add_argument("--report", required=True, help="analysis report JSON")
    p.add_argument("--graph", help="call-graph file when not embedded in the report")
    p.add_argument("--port", type=int, default=8734)
    p.add_argument("--store", default="triage_events.jsonl", help="append-only event log path")
    p.add_argument("--ui-dir", help="static UI bundle directory served at /")
    p.add_argument("--source-dir", help="directory with program sources for the viewer")
    return parser


def _cmd_ingest(args) -> int:
    config = pipeline.load_ingest_config(args.config) if args.config else None
    entries, counts = pipeline.run_ingest(args.nvd, args.manual, config)
    pipeline.write_json(args.out, nvd.ground_truth_to_json(entries))
    print(f"kept {counts['kept']} records")
    for key in (
        "dropped_no_cvss3",
        "dropped_not_c_program",
        "dropped_not_buffer_overflow",
        "dropped_no_function_name",
    ):
        print(f"{key.replace('_', ' ')}: {counts[key]}")
    print(f"wrote {len(entries)} ground-truth entries to {args.out}")
    return 0


def _cmd_features(args) -> int:
    report, csv_path, sidecar_path = pipeline.run_features(args.report, args.graph, args.out)
    vulnerable = sum(1 for _ in json.loads(Path(sidecar_path).read_text())["vulnerable"])
    print(f"wrote {len(report.graph)} feature rows to {csv_path}")
    print(f"wrote sidecar with {vulnerable} vulnerable functions to {sidecar_path}")
    return 0


def _cmd_train(args) -> int:
    seeds = None
    if args.seeds:
        seeds = [int(s) for s in args.seeds.split(",")]
    _, metrics = pipeline.run_train(
        args.features,
        args.ground_truth,
        algo=args.algo,
        kfolds=args.kfolds,
        split=args.split,
        seed=args.seed,
        seeds=seeds,
        feature_mode=args.feature_mode,
        model_out=args.model_out,
        metrics_out=args.metrics_out,
        jobs=args.jobs,
    )
    print(f"trained {args.algo} on {metrics['train_size']} examples "
          f"(test {metrics['test_size']})")
    for metric, acc in metrics["accuracy"].items():
        print(f"  {metric}: {acc:.2f}")
    print(f"wrote {args.model_out} and {args.metrics_out}")
    return 0


def _cmd_predict(args) -> int:
    assessment = pipeline.run_predict(args.model, args.features, args.ground_truth, args.out)
    predicted = sum(1 for f in assessment["functions"] if f["provenance"] == "Predicted")
    print(f"assessed {len(assessment['functions'])} vulnerable functions "
          f"({predicted} predicted) -> {args.out}")
    return 0


def _cmd_serve(args) -> int:
    graph = None
    if args.graph:
        text = Path(args.graph).read_text()
        if args.graph.endswith(".dot"):
            graph = parse_callgraph_dot(text)
        else:
            from .callgraph import graph_from_json

            graph = graph_from_json(json.loads(text))
    report = parse_analysis_report(Path(args.report).read_text(), graph=graph)
    assessment = json.loads(Path(args.assessment).read_text())
    store = TriageStore(args.store)
    service = TriageService(report, assessment, store, source_dir=args.source_dir)
    admin_token = os.environ.get("VULNSCORE_ADMIN_TOKEN")
    try:
        server = make_server(service, args.port, ui_dir=args.ui_dir, admin_token=admin_token)
    except OSError as exc:
        print(f"cannot bind port {args.port}: {exc}", file=sys.stderr)
        return 1
    print(f"serving {report.program} {report.version} on http://127.0.0.1:{args.port} "
          f"(store: {args.store})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
        server.server_close()
        print("shut down; event log flushed")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "features": _cmd_features,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (VulnscoreError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - anything else is an internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
