"""Call-graph and analysis-report data model, parsers, and graph queries.

Two input formats are accepted: a DOT subset (digraph with node attribute
lists) and a native JSON schema that additionally carries per-function
metrics and the discovered vulnerabilities. Parsed objects are immutable
and safe to share across threads.
"""

import json
import re
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    IntegrityError,
    NotFoundError,
    ParseError,
    UnsupportedFormatError,
    ValidationError,
)

VULNERABILITY_KIND = "buffer-overflow"


@dataclass(frozen=True)
class FunctionNode:
    """One program function and its static metrics."""

    name: str
    file: str | None = None
    line: int | None = None
    is_interface: bool = False
    instruction_count: int = 0
    basic_block_count: int = 0
    pointer_param_count: int = 0

    def __post_init__(self):
        if not self.name:
            raise ValidationError("function name must be non-empty")
        for attr in ("instruction_count", "basic_block_count", "pointer_param_count"):
            if getattr(self, attr) < 0:
                raise ValidationError(f"{attr} must be non-negative", path=self.name)
        if (
            self.instruction_count > 0
            and self.basic_block_count > 0
            and self.instruction_count < self.basic_block_count
        ):
            raise ValidationError(
                "instruction_count must be >= basic_block_count (a basic block holds "
                "at least one instruction)",
                path=self.name,
            )


class CallGraph:
    """Immutable directed graph of functions.

    Edges are caller -> callee pairs; duplicates collapse, self-loops are
    permitted (direct recursion). Every edge endpoint must name a node.
    """

    def __init__(self, nodes, edges):
        node_map: dict[str, FunctionNode] = {}
        for node in nodes:
            if node.name in node_map:
                raise ValidationError(f"duplicate function name {node.name!r}")
            node_map[node.name] = node
        edge_set = set()
        for caller, callee in edges:
            if caller not in node_map:
                raise IntegrityError(f"edge references unknown caller {caller!r}")
            if callee not in node_map:
                raise IntegrityError(f"edge references unknown callee {callee!r}")
            edge_set.add((caller, callee))
        self._nodes = node_map
        self._edges = tuple(sorted(edge_set))
        callees: dict[str, list[str]] = {name: [] for name in node_map}
        callers: dict[str, list[str]] = {name: [] for name in node_map}
        for caller, callee in self._edges:
            callees[caller].append(callee)
            callers[callee].append(caller)
        self._callees = {k: tuple(v) for k, v in callees.items()}
        self._callers = {k: tuple(v) for k, v in callers.items()}

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return self._edges

    @property
    def function_names(self) -> tuple[str, ...]:
        return tuple(sorted(self._nodes))

    def __contains__(self, name: str) -> bool:
        return name in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def node(self, name: str) -> FunctionNode:
        try:
            return self._nodes[name]
        except KeyError:
            raise NotFoundError(f"unknown function {name!r}") from None

    def callers(self, name: str) -> tuple[str, ...]:
        self.node(name)
        return self._callers[name]

    def callees(self, name: str) -> tuple[str, ...]:
        self.node(name)
        return self._callees[name]

    def has_edge(self, caller: str, callee: str) -> bool:
        return callee in self._callees.get(caller, ())

    def __eq__(self, other) -> bool:
        if not isinstance(other, CallGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges


@dataclass(frozen=True)
class Vulnerability:
    """One discovered vulnerability and the chains through which it is exploitable.

    Each chain is ordered caller -> ... -> origin and ends at ``function``;
    the one-element chain ``[function]`` is always present.
    """

    id: str
    function: str
    location: tuple[str, int]
    kind: str = VULNERABILITY_KIND
    chains: tuple[tuple[str, ...], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind != VULNERABILITY_KIND:
            raise ValidationError(
                f"unsupported vulnerability kind {self.kind!r}", path=self.id
            )
        for chain in self.chains:
            if not chain:
                raise ValidationError("empty infection chain", path=self.id)
            if chain[-1] != self.function:
                raise ValidationError(
                    f"chain {list(chain)} does not end at {self.function!r}", path=self.id
                )
        if (self.function,) not in self.chains:
            raise ValidationError(
                f"origin chain [{self.function!r}] missing", path=self.id
            )

    def infects(self, fn: str) -> bool:
        """True when any recorded chain passes through ``fn``."""
        return any(fn in chain for chain in self.chains)


@dataclass(frozen=True)
class AnalysisReport:
    """Parsed compositional-analysis output: program, call-graph, vulnerabilities."""

    program: str
    version: str
    graph: CallGraph
    vulnerabilities: tuple[Vulnerability, ...]

    def __post_init__(self):
        for vuln in self.vulnerabilities:
            if vuln.function not in self.graph:
                raise IntegrityError(
                    f"vulnerability {vuln.id!r} names unknown function {vuln.function!r}"
                )
            for chain in vuln.chains:
                for name in chain:
                    if name not in self.graph:
                        raise IntegrityError(
                            f"chain of {vuln.id!r} references unknown function {name!r}"
                        )
                for a, b in zip(chain, chain[1:]):
                    if not self.graph.has_edge(a, b):
                        raise IntegrityError(
                            f"chain of {vuln.id!r} uses missing edge ({a!r}, {b!r})"
                        )

    def vulnerabilities_infecting(self, fn: str) -> tuple[Vulnerability, ...]:
        return tuple(v for v in self.vulnerabilities if v.infects(fn))


# ---------------------------------------------------------------------------
# DOT parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<comment>//[^\n]*|\#[^\n]*|/\*.*?\*/)
  | (?P<newline>\n)
  | (?P<ws>[ \t\r]+)
  | (?P<arrow>->)
  | (?P<undirected>--)
  | (?P<punct>[{}\[\];,=])
  | (?P<quoted>"(?:[^"\\]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.]*|-?[0-9]+(?:\.[0-9]+)?)
    """,
    re.VERBOSE | re.DOTALL,
)

_NODE_ATTRS = {
    "interface": "is_interface",
    "instructions": "instruction_count",
    "basic_blocks": "basic_block_count",
    "pointer_params": "pointer_param_count",
}


def _tokenize_dot(text: str):
    tokens = []
    pos = 0
    line = 1
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line=line)
        kind = match.lastgroup
        value = match.group()
        if kind in ("ws",):
            pass
        elif kind in ("comment", "newline"):
            line += value.count("\n")
        elif kind == "quoted":
            tokens.append(("ident", value[1:-1].replace('\\"', '"'), line))
        elif kind == "punct":
            tokens.append((value, value, line))
        else:
            tokens.append((kind, value, line))
        pos = match.end()
    tokens.append(("eof", "", line))
    return tokens


class _DotParser:
    """Recursive-descent parser for the supported DOT subset."""

    def __init__(self, text: str):
        self._tokens = _tokenize_dot(text)
        self._index = 0

    def _peek(self):
        return self._tokens[self._index]

    def _next(self):
        token = self._tokens[self._index]
        self._index += 1
        return token

    def _expect(self, kind: str, what: str):
        token = self._next()
        if token[0] != kind:
            raise ParseError(f"expected {what}, found {token[1]!r}", line=token[2])
        return token

    def parse(self) -> CallGraph:
        kind, value, line = self._next()
        if kind == "ident" and value == "strict":
            kind, value, line = self._next()
        if kind == "ident" and value == "graph":
            raise UnsupportedFormatError("undirected graphs are not supported", line=line)
        if kind != "ident" or value != "digraph":
            raise ParseError(f"expected 'digraph', found {value!r}", line=line)
        if self._peek()[0] == "ident":  # optional graph name
            self._next()
        self._expect("{", "'{'")
        declared: dict[str, dict] = {}
        edges: list[tuple[str, str]] = []
        order: list[str] = []

        def touch(name: str) -> dict:
            if name not in declared:
                declared[name] = {}
                order.append(name)
            return declared[name]

        while True:
            kind, value, line = self._peek()
            if kind == "}":
                self._next()
                break
            if kind == ";":
                self._next()
                continue
            if kind == "eof":
                raise ParseError("unterminated graph body", line=line)
            if kind != "ident":
                raise ParseError(f"expected identifier, found {value!r}", line=line)
            name = self._next()[1]
            touch(name)
            # edge chain: a -> b -> c
            while self._peek()[0] in ("arrow", "undirected"):
                op_kind, _, op_line = self._next()
                if op_kind == "undirected":
                    raise UnsupportedFormatError(
                        "undirected edges ('--') are not supported", line=op_line
                    )
                target = self._expect("ident", "edge target")[1]
                touch(target)
                edges.append((name, target))
                name = target
            if self._peek()[0] == "[":
                attrs = self._parse_attr_list()
                declared[name].update(attrs)

        nodes = [self._make_node(name, declared[name]) for name in order]
        return CallGraph(nodes, edges)

    def _parse_attr_list(self) -> dict:
        self._expect("[", "'['")
        attrs: dict = {}
        while True:
            kind, value, line = self._peek()
            if kind == "]":
                self._next()
                return attrs
            key = self._expect("ident", "attribute name")
            self._expect("=", "'='")
            val = self._expect("ident", "attribute value")
            attrs[key[1]] = (val[1], val[2])
            if self._peek()[0] in (",", ";"):
                self._next()

    @staticmethod
    def _make_node(name: str, attrs: dict) -> FunctionNode:
        fields: dict = {"name": name}
        for dot_name, field_name in _NODE_ATTRS.items():
            if dot_name not in attrs:
                continue
            raw, line = attrs[dot_name]
            if field_name == "is_interface":
                lowered = raw.lower()
                if lowered not in ("true", "false"):
                    raise ParseError(
                        f"attribute interface must be true/false, found {raw!r}", line=line
                    )
                fields[field_name] = lowered == "true"
            else:
                try:
                    fields[field_name] = int(raw)
                except ValueError:
                    raise ParseError(
                        f"attribute {dot_name} must be an integer, found {raw!r}", line=line
                    ) from None
        return FunctionNode(**fields)


def parse_callgraph_dot(text: str) -> CallGraph:
    """Parse a call-graph from the supported DOT subset.

    Recognized node attributes: ``interface`` ("true"/"false"),
    ``instructions``, ``basic_blocks``, ``pointer_params``; anything else
    (label, shape, ...) is ignored so graphs decorated for rendering still load.
    """
    return _DotParser(text).parse()


# ---------------------------------------------------------------------------
# Native JSON schema
# ---------------------------------------------------------------------------


def _require(mapping, key, types, path):
    if key not in mapping:
        raise ValidationError("missing required field", path=f"{path}.{key}")
    value = mapping[key]
    if not isinstance(value, types):
        raise ValidationError(
            f"expected {getattr(types, '__name__', types)}, found {type(value).__name__}",
            path=f"{path}.{key}",
        )
    return value


def _optional(mapping, key, types, path):
    if key not in mapping or mapping[key] is None:
        return None
    value = mapping[key]
    if not isinstance(value, types):
        raise ValidationError(
            f"expected {getattr(types, '__name__', types)}, found {type(value).__name__}",
            path=f"{path}.{key}",
        )
    return value


def graph_from_json(data: dict, path: str = "$") -> CallGraph:
    """Build a CallGraph from the ``functions``/``edges`` keys of the native schema."""
    functions = _require(data, "functions", list, path)
    nodes = []
    for idx, raw in enumerate(functions):
        fpath = f"{path}.functions[{idx}]"
        if not isinstance(raw, dict):
            raise ValidationError("expected object", path=fpath)
        nodes.append(
            FunctionNode(
                name=_require(raw, "name", str, fpath),
                file=_optional(raw, "file", str, fpath),
                line=_optional(raw, "line", int, fpath),
                is_interface=bool(raw.get("is_interface", False)),
                instruction_count=_require(raw, "instructions", int, fpath)
                if "instructions" in raw
                else 0,
                basic_block_count=raw.get("basic_blocks", 0),
                pointer_param_count=raw.get("pointer_params", 0),
            )
        )
    edges_raw = _require(data, "edges", list, path)
    edges = []
    for idx, pair in enumerate(edges_raw):
        epath = f"{path}.edges[{idx}]"
        if not isinstance(pair, list) or len(pair) != 2 or not all(isinstance(x, str) for x in pair):
            raise ValidationError("expected [caller, callee] pair", path=epath)
        edges.append((pair[0], pair[1]))
    return CallGraph(nodes, edges)


def graph_to_json(graph: CallGraph) -> dict:
    """Serialize a CallGraph to the native JSON schema (functions + edges)."""
    functions = []
    for name in graph.function_names:
        node = graph.node(name)
        entry = {
            "name": node.name,
            "is_interface": node.is_interface,
            "instructions": node.instruction_count,
            "basic_blocks": node.basic_block_count,
            "pointer_params": node.pointer_param_count,
        }
        if node.file is not None:
            entry["file"] = node.file
        if node.line is not None:
            entry["line"] = node.line
        functions.append(entry)
    return {
        "functions": functions,
        "edges": [[a, b] for a, b in graph.edges],
    }


def parse_analysis_report(text: str, graph: CallGraph | None = None) -> AnalysisReport:
    """Parse and fully validate an analysis report in the native JSON schema.

    When ``graph`` is given it is used for reports that omit the embedded
    ``functions``/``edges`` keys (graph shipped separately, e.g. as DOT).
    A vulnerability's one-element origin chain is inserted if the producer
    left it implicit.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", line=exc.lineno) from None
    if not isinstance(data, dict):
        raise ValidationError("expected top-level object", path="$")
    program = _require(data, "program", str, "$")
    version = _require(data, "version", str, "$")
    if "functions" in data or graph is None:
        graph = graph_from_json(data, "$")
    vulns_raw = _require(data, "vulnerabilities", list, "$")
    vulnerabilities = []
    for idx, raw in enumerate(vulns_raw):
        vpath = f"$.vulnerabilities[{idx}]"
        if not isinstance(raw, dict):
            raise ValidationError("expected object", path=vpath)
        function = _require(raw, "function", str, vpath)
        loc_raw = _require(raw, "location", dict, vpath)
        location = (
            _require(loc_raw, "file", str, f"{vpath}.location"),
            _require(loc_raw, "line", int, f"{vpath}.location"),
        )
        chains_raw = _require(raw, "chains", list, vpath)
        chains = []
        for cidx, chain in enumerate(chains_raw):
            cpath = f"{vpath}.chains[{cidx}]"
            if (
                not isinstance(chain, list)
                or not chain
                or not all(isinstance(x, str) for x in chain)
            ):
                raise ValidationError("expected non-empty list of function names", path=cpath)
            chains.append(tuple(chain))
        if (function,) not in chains:
            chains.append((function,))
        vulnerabilities.append(
            Vulnerability(
                id=_require(raw, "id", str, vpath),
                function=function,
                location=location,
                kind=_require(raw, "kind", str, vpath),
                chains=tuple(chains),
            )
        )
    return AnalysisReport(
        program=program,
        version=version,
        graph=graph,
        vulnerabilities=tuple(vulnerabilities),
    )


def report_to_json(report: AnalysisReport) -> dict:
    """Serialize an AnalysisReport back to the native JSON schema."""
    data = {"program": report.program, "version": report.version}
    data.update(graph_to_json(report.graph))
    data["vulnerabilities"] = [
        {
            "id": v.id,
            "function": v.function,
            "location": {"file": v.location[0], "line": v.location[1]},
            "kind": v.kind,
            "chains": [list(chain) for chain in v.chains],
        }
        for v in report.vulnerabilities
    ]
    return data


# ---------------------------------------------------------------------------
# Graph queries
# ---------------------------------------------------------------------------


def neighbors(graph: CallGraph, fn: str, direction: str = "both") -> set[str]:
    """Callers ("in"), callees ("out"), or their union ("both") of a function.

    A self-loop makes a function its own caller and callee, but it is never
    its own neighbour in the "both" view (clustering concerns pairs of
    distinct neighbours).
    """
    if direction not in ("in", "out", "both"):
        raise ValueError(f"direction must be 'in', 'out' or 'both', not {direction!r}")
    if direction == "in":
        return set(graph.callers(fn))
    if direction == "out":
        return set(graph.callees(fn))
    both = set(graph.callers(fn)) | set(graph.callees(fn))
    both.discard(fn)
    return both


def shortest_path_length(graph: CallGraph, source: str, target: str) -> int | None:
    """Breadth-first distance from ``source`` to ``target`` along directed edges.

    Returns 0 when the names coincide and None when ``target`` is unreachable.
    """
    graph.node(target)
    if source == target:
        graph.node(source)
        return 0
    distances = {source: 0}
    queue = deque([source])
    graph.node(source)
    while queue:
        current = queue.popleft()
        for nxt in graph.callees(current):
            if nxt in distances:
                continue
            distances[nxt] = distances[current] + 1
            if nxt == target:
                return distances[nxt]
            queue.append(nxt)
    return None


def connected_component_of(graph: CallGraph, entry: str) -> set[str]:
    """All functions reachable from an interface ``entry``, including itself."""
    node = graph.node(entry)
    if not node.is_interface:
        raise ValueError(f"{entry!r} is not an interface function")
    seen = {entry}
    queue = deque([entry])
    while queue:
        current = queue.popleft()
        for nxt in graph.callees(current):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen
