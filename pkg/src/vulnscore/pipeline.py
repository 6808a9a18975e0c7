"""File-level orchestration of the assessment pipeline.

ingest: NVD feeds + manual annotations -> ground-truth JSON
features: analysis report (+ optional DOT graph) -> feature CSV + sidecar
train: feature files + ground truth -> persisted model set + metrics
predict: model + features (+ optional ground truth) -> assessment JSON

All outputs are canonical JSON/CSV: identical inputs and seeds reproduce
identical bytes.
"""

import configparser
import json
from pathlib import Path

from . import nvd
from .callgraph import AnalysisReport, parse_analysis_report, parse_callgraph_dot
from .cvss3 import base_score, serialize_vector
from .errors import ValidationError
from .features import FeatureVector, extract_all, feature_matrix_csv, parse_feature_matrix_csv
from .ml import Dataset, LabeledExample, TrainedModelSet, split_dataset, train_model_set


def write_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def load_ingest_config(path) -> nvd.IngestConfig:
    """Read the [nvd] section of an INI config into an IngestConfig."""
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    section = parser["nvd"] if parser.has_section("nvd") else {}

    def split_csv(raw):
        return frozenset(x.strip() for x in raw.split(",") if x.strip())

    cwes = nvd.DEFAULT_BUFFER_OVERFLOW_CWES
    if "buffer_overflow_cwes" in section:
        cwes = split_csv(section["buffer_overflow_cwes"])
    allowlist = None
    if "c_products" in section:
        allowlist = split_csv(section["c_products"])
    return nvd.IngestConfig(buffer_overflow_cwes=cwes, product_allowlist=allowlist)


def run_ingest(nvd_paths, manual_path=None, config=None):
    """Parse feeds, filter, merge manual annotations; returns (entries, counts)."""
    records = []
    for path in nvd_paths:
        records.extend(nvd.parse_nvd_feed(Path(path).read_text()))
    manual = []
    if manual_path is not None:
        manual = nvd.ground_truth_from_json(
            json.loads(Path(manual_path).read_text()), provenance="Manual"
        )
    kept, counts = nvd.filter_report(records, config)
    entries = nvd.build_ground_truth(kept, manual, config)
    return entries, counts


def run_features(report_path, graph_path=None, out_csv="features.csv"):
    """Extract the feature matrix and the vulnerable-function sidecar.

    The sidecar lands next to the CSV with a .json suffix and carries the
    program identity plus per-function locations and chains needed later by
    predict and serve.
    """
    graph = None
    if graph_path is not None:
        graph_text = Path(graph_path).read_text()
        if str(graph_path).endswith(".dot"):
            graph = parse_callgraph_dot(graph_text)
        else:
            from .callgraph import graph_from_json

            graph = graph_from_json(json.loads(graph_text))
    report = parse_analysis_report(Path(report_path).read_text(), graph=graph)
    out_csv = Path(out_csv)
    out_csv.write_text(feature_matrix_csv(report))
    sidecar = sidecar_for(report)
    sidecar_path = out_csv.with_suffix(".json")
    write_json(sidecar_path, sidecar)
    return report, out_csv, sidecar_path


def sidecar_for(report: AnalysisReport) -> dict:
    vulnerable = []
    vectors = extract_all(report)
    for name in report.graph.function_names:
        if vectors[name].nv == 0:
            continue
        locations = sorted(
            {v.location for v in report.vulnerabilities if v.infects(name)}
        )
        chains = sorted(
            {chain for v in report.vulnerabilities for chain in v.chains if name in chain}
        )
        vulnerable.append(
            {
                "name": name,
                "locations": [{"file": f, "line": l} for f, l in locations],
                "chains": [list(c) for c in chains],
            }
        )
    return {
        "program": report.program,
        "version": report.version,
        "vulnerable": vulnerable,
    }


def load_feature_file(csv_path):
    """Load a feature CSV plus its sidecar; returns (meta, vectors)."""
    csv_path = Path(csv_path)
    vectors = parse_feature_matrix_csv(csv_path.read_text())
    sidecar_path = csv_path.with_suffix(".json")
    if not sidecar_path.exists():
        raise ValidationError(f"missing feature sidecar {sidecar_path}")
    meta = json.loads(sidecar_path.read_text())
    return meta, vectors


def assemble_dataset(feature_paths, entries, feature_mode: str) -> Dataset:
    """Join ground-truth entries with feature rows on (program, version, function)."""
    index: dict[tuple[str, str, str], FeatureVector] = {}
    for path in feature_paths:
        meta, vectors = load_feature_file(path)
        for name, vec in vectors.items():
            index[(meta["program"], meta["version"], name)] = vec
    missing = [e.key for e in entries if e.key not in index]
    if missing:
        raise ValidationError(
            "ground-truth functions absent from feature files: "
            + ", ".join("/".join(key) for key in sorted(missing))
        )
    examples = [
        LabeledExample(key=e.key, features=index[e.key], labels=e.vector)
        for e in sorted(entries, key=lambda e: e.key)
    ]
    return Dataset(examples, feature_mode)


def derive_seeds(seed: int, count: int = 10) -> list[int]:
    return [seed + i for i in range(count)]


def run_train(
    feature_paths,
    ground_truth_path,
    algo: str = "rf",
    kfolds: int = 4,
    split: float = 0.75,
    seed: int = 0,
    seeds=None,
    feature_mode: str = "extended10",
    model_out="model.json",
    metrics_out="metrics.json",
    params=None,
    jobs: int = 1,
):
    """Train the per-metric ensembles and report test accuracy."""
    entries = nvd.ground_truth_from_json(json.loads(Path(ground_truth_path).read_text()))
    dataset = assemble_dataset(feature_paths, entries, feature_mode)
    train, test = split_dataset(dataset, split, seed)
    seeds = list(seeds) if seeds is not None else derive_seeds(seed)
    model = train_model_set(train, algo, kfolds, seeds, params=params, jobs=jobs)
    write_json(model_out, model.to_json())
    metrics = {
        "algorithm": algo,
        "feature_mode": feature_mode,
        "kfolds": kfolds,
        "seeds": seeds,
        "split": split,
        "train_size": len(train),
        "test_size": len(test),
        "accuracy": model.accuracy_report(test),
    }
    write_json(metrics_out, metrics)
    return model, metrics


def run_predict(model_path, features_path, ground_truth_path=None, out="assessment.json"):
    """Build the assessment: known functions keep their scored vectors,
    everything else gets a model prediction."""
    model = TrainedModelSet.from_json(json.loads(Path(model_path).read_text()))
    meta, vectors = load_feature_file(features_path)
    known = {}
    if ground_truth_path is not None:
        for entry in nvd.ground_truth_from_json(
            json.loads(Path(ground_truth_path).read_text())
        ):
            if entry.program == meta["program"] and entry.version == meta["version"]:
                known[entry.function] = entry.vector
    functions = []
    for item in meta["vulnerable"]:
        name = item["name"]
        vec = vectors[name]
        if name in known:
            vector = known[name]
            provenance = "GroundTruth"
        else:
            vector = model.predict_metrics(vec)
            provenance = "Predicted"
        score = base_score(vector)
        functions.append(
            {
                "name": name,
                "features": vec.as_dict(),
                "vector": serialize_vector(vector),
                "score": score.value,
                "rating": score.rating,
                "provenance": provenance,
                "locations": item["locations"],
                "chains": item["chains"],
            }
        )
    assessment = {
        "program": meta["program"],
        "version": meta["version"],
        "functions": functions,
    }
    write_json(out, assessment)
    return assessment
