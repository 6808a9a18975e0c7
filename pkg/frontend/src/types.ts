// Payload shapes of the triage service API and the CVSS3 metric tables
// the editor renders. Values are the single-letter codes of the vector
// string notation; DISPLAY_NAMES maps them for humans.

export type Metric = "AV" | "AC" | "PR" | "UI" | "S" | "C" | "I" | "A";

export const METRIC_ORDER: Metric[] = ["AV", "AC", "PR", "UI", "S", "C", "I", "A"];

export const METRIC_LABELS: Record<Metric, string> = {
  AV: "Attack Vector",
  AC: "Attack Complexity",
  PR: "Privileges Required",
  UI: "User Interaction",
  S: "Scope",
  C: "Confidentiality",
  I: "Integrity",
  A: "Availability",
};

export const METRIC_VALUES: Record<Metric, string[]> = {
  AV: ["N", "A", "L", "P"],
  AC: ["L", "H"],
  PR: ["N", "L", "H"],
  UI: ["N", "R"],
  S: ["U", "C"],
  C: ["N", "L", "H"],
  I: ["N", "L", "H"],
  A: ["N", "L", "H"],
};

export const DISPLAY_NAMES: Record<Metric, Record<string, string>> = {
  AV: { N: "Network", A: "Adjacent", L: "Local", P: "Physical" },
  AC: { L: "Low", H: "High" },
  PR: { N: "None", L: "Low", H: "High" },
  UI: { N: "None", R: "Required" },
  S: { U: "Unchanged", C: "Changed" },
  C: { N: "None", L: "Low", H: "High" },
  I: { N: "None", L: "Low", H: "High" },
  A: { N: "None", L: "Low", H: "High" },
};

export interface SourceLocation {
  file: string;
  line: number;
}

export interface GraphNode {
  name: string;
  file: string | null;
  line: number | null;
  is_interface: boolean;
  vulnerable: boolean;
  vulnerable_lines: SourceLocation[];
}

export interface GraphPayload {
  program: string;
  version: string;
  nodes: GraphNode[];
  edges: [string, string][];
  sources?: Record<string, string>;
}

export interface Assessment {
  function: string;
  metrics: Record<Metric, string>;
  vector: string;
  score: number;
  rating: string;
  overridden_metrics: string[];
}

export interface FeedbackAck {
  id: string;
  unknown_functions: string[];
}

export type ClientEventKind = "node_clicked" | "source_expanded";
