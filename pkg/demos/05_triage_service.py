#!/usr/bin/env python3
# Spin up the triage service on the bundled fixture, drive it the way the
# browser UI does, and show the append-only event log.

import json
import tempfile
import threading
import urllib.request
from pathlib import Path

from vulnscore import pipeline
from vulnscore.callgraph import parse_analysis_report
from vulnscore.service import TriageService, TriageStore, make_server

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

workdir = Path(tempfile.mkdtemp(prefix="vulnscore-demo-"))

# Build an assessment with the pipeline: features -> train -> predict.
_, csv_path, _ = pipeline.run_features(FIXTURES / "autotrace.json", out_csv=workdir / "features.csv")
config = pipeline.load_ingest_config(FIXTURES / "config.ini")
entries, _ = pipeline.run_ingest([FIXTURES / "nvd_feed.json"], FIXTURES / "manual_scores.json", config)
from vulnscore.nvd import ground_truth_to_json

pipeline.write_json(workdir / "gt.json", ground_truth_to_json(entries))
pipeline.run_train(
    [csv_path], workdir / "gt.json", kfolds=2, seed=7,
    model_out=workdir / "model.json", metrics_out=workdir / "metrics.json",
)
assessment = pipeline.run_predict(
    workdir / "model.json", csv_path, workdir / "gt.json", out=workdir / "assessment.json"
)

report = parse_analysis_report((FIXTURES / "autotrace.json").read_text())
store = TriageStore(workdir / "events.jsonl")
service = TriageService(report, assessment, store, source_dir=FIXTURES / "src")

httpd = make_server(service, 0)
port = httpd.server_address[1]
threading.Thread(target=httpd.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{port}"
print(f"service listening on {base}\n")


def get(path):
    with urllib.request.urlopen(base + path) as resp:
        return json.loads(resp.read())


def send(path, method, payload):
    req = urllib.request.Request(
        base + path, method=method, data=json.dumps(payload).encode(),
        headers={"Content-Type": "application/json"},
    )
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read())


session = get("/api/session")["session"]
graph = get("/api/graph")
vulnerable = [n["name"] for n in graph["nodes"] if n["vulnerable"]]
print(f"graph: {len(graph['nodes'])} nodes; vulnerable: {vulnerable}")

# Clicking a node logs an interaction event and opens the score panel.
send("/api/event", "POST", {"kind": "node_clicked", "function": "rle_fread", "actor": session})
before = get("/api/assessment/rle_fread")
print(f"\nrle_fread before: {before['vector']}  -> {before['score']} ({before['rating']})")

# The expert disagrees with the confidentiality impact and lowers it; the
# server recomputes the aggregate and returns it.
after = send(
    "/api/assessment/rle_fread/metric", "PUT",
    {"metric": "C", "old_value": before["metrics"]["C"], "new_value": "L", "actor": session},
)
print(f"rle_fread after:  {after['vector']}  -> {after['score']} ({after['rating']})")

send("/api/feedback", "POST", {"functions": ["rle_fread"], "text": "All OK.", "actor": session})

print("\nevent log:")
for record in service.export_log():
    print(" ", json.dumps(record, sort_keys=True))

httpd.shutdown()
httpd.server_close()
print(f"\nartifacts in {workdir}")
