#!/usr/bin/env python3
# Walk through the call-graph model and the ten per-function features
# using the bundled autotrace fixture.

from pathlib import Path

from vulnscore.callgraph import (
    connected_component_of,
    neighbors,
    parse_analysis_report,
    parse_callgraph_dot,
    shortest_path_length,
)
from vulnscore.features import extract_feature_vector, feature_matrix_csv

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# Two input formats carry the same graph: a DOT digraph with node
# attributes, and the native JSON analysis report that also lists the
# discovered vulnerabilities and their infection chains.
dot_graph = parse_callgraph_dot((FIXTURES / "autotrace.dot").read_text())
report = parse_analysis_report((FIXTURES / "autotrace.json").read_text())
graph = report.graph

print(f"{report.program} {report.version}: "
      f"{len(graph)} functions, {len(graph.edges)} call edges, "
      f"{len(report.vulnerabilities)} reported vulnerabilities")

# Basic queries: who calls rle_fread, and what does it call?
print("\ncallers of rle_fread: ", sorted(neighbors(graph, "rle_fread", "in")))
print("callees of rle_fread: ", sorted(neighbors(graph, "rle_fread", "out")))
print("all neighbours:       ", sorted(neighbors(graph, "rle_fread", "both")))

# Directed shortest paths power the distance-to-interface feature.
print("\nhops main -> std_fread:", shortest_path_length(graph, "main", "std_fread"))
print("reachable from main:   ", sorted(connected_component_of(graph, "main")))

# The feature vector per function, in fixed order
# [d_in, d_out, di, cc, nl, nv, li, s, fx, pt].
for name in ("rle_fread", "std_fread", "ReadImage"):
    vec = extract_feature_vector(report, name)
    print(f"\n{name}:")
    for feature, value in vec.as_dict().items():
        print(f"  {feature:>5} = {value}")

# The whole matrix exports as CSV for the training pipeline.
print("\nfeature matrix:")
print(feature_matrix_csv(report))
