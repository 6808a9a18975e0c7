#!/usr/bin/env python3
# From a raw NVD feed to a training ground truth: the four report filters
# and the (program, version, function) -> vector linking step.

import json
from pathlib import Path

from vulnscore.cvss3 import serialize_vector
from vulnscore.nvd import (
    build_ground_truth,
    extract_function_names,
    filter_report,
    ground_truth_from_json,
    parse_nvd_feed,
)
from vulnscore.pipeline import load_ingest_config

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

records = parse_nvd_feed((FIXTURES / "nvd_feed.json").read_text())
print(f"feed carries {len(records)} CVE items:")
for r in records:
    names = extract_function_names(r.description)
    print(f"  {r.id}: cwe={','.join(r.cwe_ids) or '-'} "
          f"cvss3={'yes' if r.cvss3_vector else 'no'} functions={names or '-'}")

# The filters: CVSS3 notation, C program (product allow-list from the
# config file), buffer-overflow CWE, and a named vulnerable function.
config = load_ingest_config(FIXTURES / "config.ini")
kept, counts = filter_report(records, config)
print("\nfilter outcome:")
for key, value in counts.items():
    print(f"  {key}: {value}")

# Manually scored functions augment the NVD-derived entries.
manual = ground_truth_from_json(
    json.loads((FIXTURES / "manual_scores.json").read_text()), provenance="Manual"
)
entries = build_ground_truth(kept, manual, config)
print(f"\nground truth ({len(entries)} entries):")
for e in entries:
    print(f"  {e.program} {e.version} {e.function:12} "
          f"{serialize_vector(e.vector)}  [{e.provenance}]")
