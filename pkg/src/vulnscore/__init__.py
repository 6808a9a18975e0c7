"""vulnscore: severity assessment for vulnerabilities found by compositional analysis.

Parses program call-graphs and analysis reports, extracts structural
features per function, learns per-metric CVSS3 classifiers from scored
historical vulnerabilities, predicts base vectors and aggregate scores for
newly reported vulnerable functions, and serves an interactive triage API
for expert review.
"""

__version__ = "0.1.0"

from .callgraph import (
    AnalysisReport,
    CallGraph,
    FunctionNode,
    Vulnerability,
    connected_component_of,
    neighbors,
    parse_analysis_report,
    parse_callgraph_dot,
    shortest_path_length,
)
from .cvss3 import Cvss3Score, Cvss3Vector, base_score, parse_vector, serialize_vector
from .features import FeatureVector, extract_feature_vector
from .ml import Dataset, LabeledExample, TrainedModelSet, train_model_set
from .nvd import CveRecord, GroundTruthEntry, build_ground_truth, filter_records, parse_nvd_feed

__all__ = [
    "AnalysisReport",
    "CallGraph",
    "CveRecord",
    "Cvss3Score",
    "Cvss3Vector",
    "Dataset",
    "FeatureVector",
    "FunctionNode",
    "GroundTruthEntry",
    "LabeledExample",
    "TrainedModelSet",
    "Vulnerability",
    "base_score",
    "build_ground_truth",
    "connected_component_of",
    "extract_feature_vector",
    "filter_records",
    "neighbors",
    "parse_analysis_report",
    "parse_callgraph_dot",
    "parse_nvd_feed",
    "parse_vector",
    "serialize_vector",
    "shortest_path_length",
    "train_model_set",
]
