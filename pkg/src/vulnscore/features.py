"""Per-function structural features and the ten-dimensional feature vector.

Seven features come from the call-graph and the analysis report (node
degrees, distance to interface, clustering coefficient, node path length,
vulnerabilities discovered, maximum infection length); the remaining three
are static function metrics carried on the nodes (size, complexity,
pointer parameters).
"""

import io
from collections import deque
from dataclasses import dataclass

from .callgraph import AnalysisReport, CallGraph, neighbors
from .errors import ConfigurationError

#: Fixed component order of the feature vector.
FEATURE_NAMES = ("d_in", "d_out", "di", "cc", "nl", "nv", "li", "s", "fx", "pt")

#: Feature modes: the original seven-dimensional vector or the extended ten.
FEATURE_MODES = {"original7": FEATURE_NAMES[:7], "extended10": FEATURE_NAMES}


@dataclass(frozen=True)
class FeatureVector:
    """One function's features, ordered [d_in, d_out, di, cc, nl, nv, li, s, fx, pt]."""

    d_in: int
    d_out: int
    di: int
    cc: float
    nl: float
    nv: int
    li: int
    s: int
    fx: int
    pt: int

    def __post_init__(self):
        if not 0.0 <= self.cc <= 1.0:
            raise ValueError(f"cc must lie in [0, 1], got {self.cc}")
        for name in ("d_in", "d_out", "di", "nv", "li", "s", "fx", "pt"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.nl < 0.0:
            raise ValueError("nl must be non-negative")
        if self.nv >= 1 and self.li < 1:
            raise ValueError("li must be >= 1 for a vulnerable function")

    def values(self, mode: str = "extended10") -> tuple[float, ...]:
        """Components in fixed order, truncated to 7 in original7 mode."""
        names = FEATURE_MODES[mode]
        return tuple(float(getattr(self, name)) for name in names)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in FEATURE_NAMES}


def node_degree(graph: CallGraph, fn: str) -> tuple[int, int]:
    """(caller count, callee count) of a function; a self-loop counts in both."""
    graph.node(fn)
    return len(graph.callers(fn)), len(graph.callees(fn))


def distance_to_interface(graph: CallGraph, fn: str) -> int:
    """Shortest call-path length from any interface function to ``fn``.

    Interfaces map to 0. Functions unreachable from every interface get the
    sentinel ``len(graph)``, which exceeds any realizable path length.
    """
    graph.node(fn)
    interfaces = [name for name in graph.function_names if graph.node(name).is_interface]
    if not interfaces:
        raise ConfigurationError("graph has no interface function")
    # multi-source BFS from all interfaces at once
    distances = {name: 0 for name in interfaces}
    queue = deque(interfaces)
    while queue:
        current = queue.popleft()
        if current == fn:
            return distances[current]
        for nxt in graph.callees(current):
            if nxt not in distances:
                distances[nxt] = distances[current] + 1
                queue.append(nxt)
    return distances.get(fn, len(graph))


def clustering_coefficient(graph: CallGraph, fn: str) -> float:
    """Fraction of a function's neighbour pairs that are themselves connected.

    Neighbourhood is the union of callers and callees, and pair connectivity
    ignores edge direction. Fewer than two neighbours yields 0.0.
    """
    hood = sorted(neighbors(graph, fn, "both"))
    k = len(hood)
    if k < 2:
        return 0.0
    connected = 0
    for i in range(k):
        for j in range(i + 1, k):
            a, b = hood[i], hood[j]
            if graph.has_edge(a, b) or graph.has_edge(b, a):
                connected += 1
    return connected / (k * (k - 1) / 2)


def node_path_length(graph: CallGraph, fn: str) -> float:
    """Average breadth-first distance from ``fn`` to every node it can reach.

    The function itself is excluded; 0.0 when nothing is reachable. Cycles
    terminate via the visited set.
    """
    graph.node(fn)
    distances: dict[str, int] = {fn: 0}
    queue = deque([fn])
    while queue:
        current = queue.popleft()
        for nxt in graph.callees(current):
            if nxt not in distances:
                distances[nxt] = distances[current] + 1
                queue.append(nxt)
    del distances[fn]
    if not distances:
        return 0.0
    return sum(distances.values()) / len(distances)


def vulnerability_count(report: AnalysisReport, fn: str) -> int:
    """Distinct vulnerable-instruction locations credited to ``fn``.

    A function is credited with every vulnerability whose infection chains
    pass through it; two vulnerabilities sharing one instruction location
    count once.
    """
    report.graph.node(fn)
    locations = {v.location for v in report.vulnerabilities if v.infects(fn)}
    return len(locations)


def max_infection_length(report: AnalysisReport, fn: str) -> int:
    """Node count of the longest recorded infection chain starting at ``fn``."""
    if vulnerability_count(report, fn) == 0:
        raise ValueError(f"{fn!r} has no discovered vulnerability (nv = 0)")
    longest = 0
    for vuln in report.vulnerabilities:
        for chain in vuln.chains:
            if fn in chain:
                longest = max(longest, len(chain) - chain.index(fn))
    return longest


def extract_feature_vector(report: AnalysisReport, fn: str) -> FeatureVector:
    """Assemble the full ten-component vector for one function.

    ``li`` is encoded 0 for functions with no discovered vulnerability so
    that one fixed-width vector covers all functions.
    """
    graph = report.graph
    node = graph.node(fn)
    d_in, d_out = node_degree(graph, fn)
    nv = vulnerability_count(report, fn)
    li = max_infection_length(report, fn) if nv >= 1 else 0
    return FeatureVector(
        d_in=d_in,
        d_out=d_out,
        di=distance_to_interface(graph, fn),
        cc=clustering_coefficient(graph, fn),
        nl=node_path_length(graph, fn),
        nv=nv,
        li=li,
        s=node.instruction_count,
        fx=node.basic_block_count,
        pt=node.pointer_param_count,
    )


def extract_all(report: AnalysisReport) -> dict[str, FeatureVector]:
    """Feature vectors for every function, keyed by name."""
    return {name: extract_feature_vector(report, name) for name in report.graph.function_names}


def format_real(x: float) -> str:
    """Render a real with up to 6 decimal digits, trailing zeros trimmed."""
    text = f"{x:.6f}".rstrip("0")
    if text.endswith("."):
        text += "0"
    return text


def feature_matrix_csv(report: AnalysisReport) -> str:
    """The feature matrix as CSV, one row per function, sorted by name."""
    out = io.StringIO()
    out.write("function," + ",".join(FEATURE_NAMES) + "\n")
    for name, vec in sorted(extract_all(report).items()):
        cells = [name]
        for feature in FEATURE_NAMES:
            value = getattr(vec, feature)
            cells.append(format_real(value) if isinstance(value, float) else str(value))
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def parse_feature_matrix_csv(text: str) -> dict[str, FeatureVector]:
    """Inverse of :func:`feature_matrix_csv`."""
    lines = [line for line in text.splitlines() if line.strip()]
    header = lines[0].split(",")
    expected = ["function", *FEATURE_NAMES]
    if header != expected:
        raise ValueError(f"unexpected feature matrix header: {lines[0]!r}")
    vectors: dict[str, FeatureVector] = {}
    for line in lines[1:]:
        cells = line.split(",")
        name = cells[0]
        raw = dict(zip(FEATURE_NAMES, cells[1:]))
        vectors[name] = FeatureVector(
            d_in=int(raw["d_in"]),
            d_out=int(raw["d_out"]),
            di=int(raw["di"]),
            cc=float(raw["cc"]),
            nl=float(raw["nl"]),
            nv=int(raw["nv"]),
            li=int(raw["li"]),
            s=int(raw["s"]),
            fx=int(raw["fx"]),
            pt=int(raw["pt"]),
        )
    return vectors
