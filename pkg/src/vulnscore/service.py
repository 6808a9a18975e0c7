"""Expert triage service: HTTP API over an append-only event log.

State is event-sourced: the effective per-function vectors are a pure fold
of the override records in the store, applied on top of the assessment
file. Restarting against the same store replays to identical state. Many
readers may query concurrently; all writes serialize through one lock.
"""

import json
import threading
import uuid
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import unquote

from .callgraph import AnalysisReport
from .cvss3 import METRIC_ORDER, METRIC_VALUES, Cvss3Vector, base_score, parse_vector, serialize_vector
from .errors import ConflictError, NotFoundError, ValidationError

#: Interaction kinds a client may post directly. score_changed and
#: feedback_sent are recorded server-side by their triggering operations.
CLIENT_EVENT_KINDS = ("node_clicked", "source_expanded")
EVENT_KINDS = CLIENT_EVENT_KINDS + ("score_changed", "feedback_sent")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class TriageStore:
    """Append-only JSONL log. Every write hits disk before it is acknowledged."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        if not self.path.exists():
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.touch()

    def append(self, *records) -> None:
        """Write one or more records as a single atomic batch."""
        lines = "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
        with self._lock:
            with self.path.open("a") as fh:
                fh.write(lines)
                fh.flush()

    def read_all(self) -> list[dict]:
        with self.path.open() as fh:
            return [json.loads(line) for line in fh if line.strip()]


class TriageService:
    """Business operations behind the HTTP API; usable directly in tests."""

    def __init__(self, report: AnalysisReport, assessment: dict, store: TriageStore,
                 source_dir=None):
        self.report = report
        self.assessment = assessment
        self.store = store
        self.source_dir = Path(source_dir) if source_dir else None
        self._lock = threading.Lock()
        self._base: dict[str, Cvss3Vector] = {}
        self._provenance: dict[str, str] = {}
        self._meta: dict[str, dict] = {}
        for item in assessment["functions"]:
            self._base[item["name"]] = parse_vector(item["vector"])
            self._provenance[item["name"]] = item["provenance"]
            self._meta[item["name"]] = item
        self._effective: dict[str, dict[str, str]] = {
            name: {m: vec.get(m) for m in METRIC_ORDER} for name, vec in self._base.items()
        }
        self._override_count = 0
        self._feedback_count = 0
        self._replay()

    def _replay(self) -> None:
        for record in self.store.read_all():
            if record["type"] == "override":
                state = self._effective[record["function"]]
                state[record["metric"]] = record["new_value"]
                self._override_count += 1
            elif record["type"] == "feedback":
                self._feedback_count += 1

    # -- reads ------------------------------------------------------------

    def get_graph(self) -> dict:
        """Nodes with vulnerability flags, edges, and sources when available."""
        vulnerable_lines: dict[str, list[dict]] = {}
        for name in self._base:
            seen = sorted(
                {v.location for v in self.report.vulnerabilities if v.infects(name)}
            )
            vulnerable_lines[name] = [{"file": f, "line": l} for f, l in seen]
        nodes = []
        files = set()
        for name in self.report.graph.function_names:
            node = self.report.graph.node(name)
            entry = {
                "name": name,
                "file": node.file,
                "line": node.line,
                "is_interface": node.is_interface,
                "vulnerable": name in self._base,
                "vulnerable_lines": vulnerable_lines.get(name, []),
            }
            nodes.append(entry)
            if node.file:
                files.add(node.file)
        payload = {
            "program": self.report.program,
            "version": self.report.version,
            "nodes": nodes,
            "edges": [[a, b] for a, b in self.report.graph.edges],
        }
        if self.source_dir is not None:
            sources = {}
            for file in sorted(files):
                candidate = self.source_dir / file
                if candidate.is_file():
                    sources[file] = candidate.read_text()
            payload["sources"] = sources
        return payload

    def get_assessment(self, function: str) -> dict:
        """Effective metric values and the recomputed aggregate for one function."""
        if function not in self._effective:
            raise NotFoundError(f"no assessment for function {function!r}")
        metrics = dict(self._effective[function])
        vector = Cvss3Vector(*(metrics[m] for m in METRIC_ORDER))
        score = base_score(vector)
        overrides = [
            {m: metrics[m]}
            for m in METRIC_ORDER
            if metrics[m] != self._base[function].get(m)
        ]
        return {
            "function": function,
            "metrics": metrics,
            "vector": serialize_vector(vector),
            "score": score.value,
            "rating": score.rating,
            "overridden_metrics": [next(iter(o)) for o in overrides],
        }

    def provenance(self) -> dict[str, str]:
        """GroundTruth/Predicted per function. Admin surface only."""
        return dict(self._provenance)

    # -- writes -----------------------------------------------------------

    def put_override(self, function: str, metric: str, old_value: str, new_value: str,
                     actor: str) -> dict:
        """Apply one metric override with compare-and-set on the old value."""
        if function not in self._effective:
            raise NotFoundError(f"no assessment for function {function!r}")
        if metric not in METRIC_VALUES:
            raise ValidationError(f"unknown metric {metric!r}")
        if new_value not in METRIC_VALUES[metric]:
            raise ValidationError(
                f"value {new_value!r} not allowed for {metric} "
                f"(allowed: {'/'.join(METRIC_VALUES[metric])})"
            )
        with self._lock:
            current = self._effective[function][metric]
            if old_value != current:
                raise ConflictError(
                    f"stale override for {function}/{metric}: value is now {current!r}",
                    current=current,
                )
            self._override_count += 1
            override_id = self._override_count
            ts = _now()
            self.store.append(
                {
                    "type": "override",
                    "id": override_id,
                    "function": function,
                    "metric": metric,
                    "old_value": old_value,
                    "new_value": new_value,
                    "actor": actor,
                    "ts": ts,
                },
                {
                    "type": "event",
                    "kind": "score_changed",
                    "function": function,
                    "actor": actor,
                    "ts": ts,
                    "override_id": override_id,
                },
            )
            self._effective[function][metric] = new_value
        return self.get_assessment(function)

    def post_feedback(self, functions, text: str, actor: str, contact=None) -> dict:
        """Store a free-text feedback item; unknown functions are flagged, not rejected."""
        if not text or not text.strip():
            raise ValidationError("feedback text must be non-empty")
        unknown = [f for f in functions if f not in self.report.graph]
        with self._lock:
            self._feedback_count += 1
            feedback_id = f"fb-{self._feedback_count}"
            ts = _now()
            record = {
                "type": "feedback",
                "id": feedback_id,
                "functions": list(functions),
                "text": text,
                "actor": actor,
                "ts": ts,
            }
            if contact:
                record["contact"] = {
                    "name": contact.get("name", ""),
                    "email": contact.get("email", ""),
                }
            if unknown:
                record["unknown_functions"] = unknown
            self.store.append(
                record,
                {
                    "type": "event",
                    "kind": "feedback_sent",
                    "function": functions[0] if functions else None,
                    "actor": actor,
                    "ts": ts,
                    "feedback_id": feedback_id,
                },
            )
        return {"id": feedback_id, "unknown_functions": unknown}

    def post_event(self, kind: str, function: str | None, actor: str) -> dict:
        """Record a client interaction event (clicks and source expansions)."""
        if kind not in CLIENT_EVENT_KINDS:
            raise ValidationError(
                f"unknown event kind {kind!r} (allowed: {', '.join(CLIENT_EVENT_KINDS)})"
            )
        record = {
            "type": "event",
            "kind": kind,
            "function": function,
            "actor": actor,
            "ts": _now(),
        }
        self.store.append(record)
        return {"ok": True}

    def export_log(self) -> list[dict]:
        """The complete ordered record stream; replaying it reproduces state."""
        return self.store.read_all()


# ---------------------------------------------------------------------------
# HTTP layer
# ---------------------------------------------------------------------------

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "application/javascript",
    ".css": "text/css",
    ".map": "application/json",
    ".svg": "image/svg+xml",
    ".json": "application/json",
}


def make_handler(service: TriageService, ui_dir, admin_token: str | None):
    ui_root = Path(ui_dir).resolve() if ui_dir else None

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # keep test output quiet
            pass

        def _send_json(self, status: int, data) -> None:
            body = json.dumps(data).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_error(self, exc) -> None:
            if isinstance(exc, NotFoundError):
                self._send_json(404, {"error": str(exc)})
            elif isinstance(exc, ConflictError):
                self._send_json(409, {"error": str(exc), "current": exc.current})
            elif isinstance(exc, (ValidationError, ValueError)):
                self._send_json(400, {"error": str(exc)})
            else:
                self._send_json(500, {"error": str(exc)})

        def _read_body(self):
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length) if length else b"{}"
            try:
                return json.loads(raw)
            except json.JSONDecodeError:
                raise ValidationError("request body is not valid JSON") from None

        def _admin_ok(self) -> bool:
            if not admin_token:
                return True
            supplied = self.headers.get("Authorization", "")
            return supplied == f"Bearer {admin_token}"

        def do_GET(self):
            try:
                path = unquote(self.path.split("?", 1)[0])
                if path == "/api/graph":
                    self._send_json(200, service.get_graph())
                elif path.startswith("/api/assessment/"):
                    function = path[len("/api/assessment/"):]
                    self._send_json(200, service.get_assessment(function))
                elif path == "/api/session":
                    self._send_json(200, {"session": f"s-{uuid.uuid4().hex}"})
                elif path == "/api/export":
                    if not self._admin_ok():
                        self._send_json(403, {"error": "admin token required"})
                        return
                    body = "".join(
                        json.dumps(r, sort_keys=True) + "\n" for r in service.export_log()
                    ).encode()
                    self.send_response(200)
                    self.send_header("Content-Type", "application/x-ndjson")
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                elif path == "/api/provenance":
                    if not self._admin_ok():
                        self._send_json(403, {"error": "admin token required"})
                        return
                    self._send_json(200, service.provenance())
                else:
                    self._serve_static(path)
            except Exception as exc:  # noqa: BLE001 - map to HTTP statuses
                self._send_error(exc)

        def do_PUT(self):
            try:
                path = unquote(self.path.split("?", 1)[0])
                if path.startswith("/api/assessment/") and path.endswith("/metric"):
                    function = path[len("/api/assessment/"):-len("/metric")]
                    body = self._read_body()
                    result = service.put_override(
                        function=function,
                        metric=body.get("metric", ""),
                        old_value=body.get("old_value", ""),
                        new_value=body.get("new_value", ""),
                        actor=body.get("actor", "anonymous"),
                    )
                    self._send_json(200, result)
                else:
                    self._send_json(404, {"error": "no such endpoint"})
            except Exception as exc:  # noqa: BLE001
                self._send_error(exc)

        def do_POST(self):
            try:
                path = unquote(self.path.split("?", 1)[0])
                body = self._read_body()
                if path == "/api/feedback":
                    result = service.post_feedback(
                        functions=body.get("functions", []),
                        text=body.get("text", ""),
                        actor=body.get("actor", "anonymous"),
                        contact=body.get("contact"),
                    )
                    self._send_json(200, result)
                elif path == "/api/event":
                    result = service.post_event(
                        kind=body.get("kind", ""),
                        function=body.get("function"),
                        actor=body.get("actor", "anonymous"),
                    )
                    self._send_json(200, result)
                else:
                    self._send_json(404, {"error": "no such endpoint"})
            except Exception as exc:  # noqa: BLE001
                self._send_error(exc)

        def _serve_static(self, path: str) -> None:
            if ui_root is None:
                self._send_json(404, {"error": "no UI bundle configured"})
                return
            rel = path.lstrip("/") or "index.html"
            target = (ui_root / rel).resolve()
            if not str(target).startswith(str(ui_root)) or not target.is_file():
                self._send_json(404, {"error": f"not found: {path}"})
                return
            body = target.read_bytes()
            self.send_response(200)
            ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return Handler


def make_server(service: TriageService, port: int, ui_dir=None,
                admin_token: str | None = None, host: str = "127.0.0.1") -> ThreadingHTTPServer:
    handler = make_handler(service, ui_dir, admin_token)
    return ThreadingHTTPServer((host, port), handler)
