"""NVD CVE feed parsing and ground-truth construction.

Parses NVD JSON 1.1 feed fragments, applies the four report filters (has a
CVSS3 vector, concerns a C program, concerns a buffer overflow, names the
vulnerable function) and links each surviving (product, function) pair to
its scored vector.
"""

import json
import re
from dataclasses import dataclass

from .cvss3 import Cvss3Score, Cvss3Vector, base_score, parse_vector, rating_of, serialize_vector
from .errors import ConflictError, ParseError, ValidationError

#: Default CWE identifiers treated as buffer overflows: the classic
#: bounds-violation CWEs plus the out-of-bounds read/write pair.
DEFAULT_BUFFER_OVERFLOW_CWES = frozenset(
    {"CWE-119", "CWE-120", "CWE-121", "CWE-122", "CWE-125", "CWE-787"}
)

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
#: The three description patterns that name a vulnerable function. Each
#: pattern's first group captures the identifier.
FUNCTION_NAME_PATTERNS = (
    re.compile(rf"\bin\s+the\s+({_IDENT})\s+function\b"),
    re.compile(rf"\bin\s+function\s+({_IDENT})\b"),
    re.compile(rf"\b({_IDENT})\(\)\s+function\b"),
)


@dataclass(frozen=True)
class CveRecord:
    """One CVE item: description, CWE tags, CVSS3 data, affected products."""

    id: str
    description: str
    cwe_ids: tuple[str, ...] = ()
    cvss3_vector: Cvss3Vector | None = None
    cvss3_score: Cvss3Score | None = None
    products: tuple[tuple[str, str, str], ...] = ()  # (vendor, product, version)


@dataclass(frozen=True)
class GroundTruthEntry:
    """A scored vulnerable function: the unit of the training ground truth."""

    program: str
    version: str
    function: str
    vector: Cvss3Vector
    provenance: str  # "NVD" | "Manual"
    source_cve: str | None = None

    def __post_init__(self):
        if not self.function:
            raise ValidationError("function must be non-empty")
        if self.provenance not in ("NVD", "Manual"):
            raise ValidationError(f"unknown provenance {self.provenance!r}")
        if self.provenance == "NVD" and not self.source_cve:
            raise ValidationError("NVD entries must trace to a CVE id")

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.program, self.version, self.function)


@dataclass(frozen=True)
class IngestConfig:
    """Tunable filter knobs for :func:`filter_records`.

    ``product_allowlist`` implements the "about C programs" filter; when
    None every product passes (language metadata is absent from the feeds,
    so the list must come from configuration).
    """

    buffer_overflow_cwes: frozenset[str] = DEFAULT_BUFFER_OVERFLOW_CWES
    product_allowlist: frozenset[str] | None = None


def _parse_cpe23(uri: str) -> tuple[str, str, str] | None:
    # cpe:2.3:a:vendor:product:version:update:... - only application entries
    parts = uri.split(":")
    if len(parts) < 6 or parts[0] != "cpe" or parts[1] != "2.3":
        return None
    if parts[2] != "a":
        return None
    return (parts[3], parts[4], parts[5])


def parse_nvd_feed(text: str) -> list[CveRecord]:
    """Parse an NVD JSON 1.1 feed fragment into records.

    Items without a ``baseMetricV3`` block yield records with absent CVSS3
    fields; a feed-supplied base score that contradicts the vector is a
    validation error.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", line=exc.lineno) from None
    if not isinstance(data, dict) or not isinstance(data.get("CVE_Items"), list):
        raise ValidationError("expected object with CVE_Items list", path="$")
    records = []
    for idx, item in enumerate(data["CVE_Items"]):
        path = f"$.CVE_Items[{idx}]"
        if not isinstance(item, dict):
            raise ValidationError("expected object", path=path)
        cve = item.get("cve", {})
        meta = cve.get("CVE_data_meta", {})
        cve_id = meta.get("ID")
        if not cve_id:
            raise ValidationError("missing CVE id", path=f"{path}.cve.CVE_data_meta.ID")

        descriptions = cve.get("description", {}).get("description_data", [])
        description = ""
        for entry in descriptions:
            if entry.get("lang", "en") == "en" and entry.get("value"):
                description = entry["value"]
                break

        cwe_ids = []
        for ptype in cve.get("problemtype", {}).get("problemtype_data", []):
            for desc in ptype.get("description", []):
                value = desc.get("value", "")
                if value.startswith("CWE-") and value not in cwe_ids:
                    cwe_ids.append(value)

        products = []
        for node in item.get("configurations", {}).get("nodes", []):
            for match in node.get("cpe_match", []):
                if not match.get("vulnerable", True):
                    continue
                triple = _parse_cpe23(match.get("cpe23Uri", ""))
                if triple is not None and triple not in products:
                    products.append(triple)

        vector = None
        score = None
        metric = item.get("impact", {}).get("baseMetricV3", {})
        cvss = metric.get("cvssV3")
        if cvss:
            vector = parse_vector(cvss["vectorString"])
            if "baseScore" in cvss:
                score = Cvss3Score(float(cvss["baseScore"]), rating_of(float(cvss["baseScore"])))
                computed = base_score(vector)
                if abs(computed.value - score.value) > 1e-9:
                    raise ValidationError(
                        f"feed base score {score.value} contradicts vector "
                        f"(computes to {computed.value})",
                        path=f"{path}.impact.baseMetricV3",
                    )

        records.append(
            CveRecord(
                id=cve_id,
                description=description,
                cwe_ids=tuple(cwe_ids),
                cvss3_vector=vector,
                cvss3_score=score,
                products=tuple(products),
            )
        )
    return records


def extract_function_names(description: str) -> list[str]:
    """Vulnerable-function identifiers named by a CVE description.

    Matches "in the <ident> function", "in function <ident>" and
    "<ident>() function", in order of appearance, deduplicated.
    """
    hits: list[tuple[int, str]] = []
    for pattern in FUNCTION_NAME_PATTERNS:
        for match in pattern.finditer(description):
            hits.append((match.start(1), match.group(1)))
    names: list[str] = []
    for _, name in sorted(hits):
        if name not in names:
            names.append(name)
    return names


def filter_report(
    records: list[CveRecord], config: IngestConfig | None = None
) -> tuple[list[CveRecord], dict[str, int]]:
    """Apply the four filters; return survivors plus per-filter drop counts.

    A record is counted against the first filter it fails, in order:
    cvss3 notation, C program (product allow-list), buffer-overflow CWE,
    named vulnerable function.
    """
    config = config or IngestConfig()
    counts = {
        "kept": 0,
        "dropped_no_cvss3": 0,
        "dropped_not_c_program": 0,
        "dropped_not_buffer_overflow": 0,
        "dropped_no_function_name": 0,
    }
    kept = []
    for record in records:
        if record.cvss3_vector is None:
            counts["dropped_no_cvss3"] += 1
            continue
        if config.product_allowlist is not None and not any(
            product in config.product_allowlist for _, product, _ in record.products
        ):
            counts["dropped_not_c_program"] += 1
            continue
        if not set(record.cwe_ids) & config.buffer_overflow_cwes:
            counts["dropped_not_buffer_overflow"] += 1
            continue
        if not extract_function_names(record.description):
            counts["dropped_no_function_name"] += 1
            continue
        counts["kept"] += 1
        kept.append(record)
    return kept, counts


def filter_records(records: list[CveRecord], config: IngestConfig | None = None) -> list[CveRecord]:
    """Records passing all four filters."""
    return filter_report(records, config)[0]


def build_ground_truth(
    records: list[CveRecord],
    manual: list[GroundTruthEntry] = (),
    config: IngestConfig | None = None,
) -> list[GroundTruthEntry]:
    """Union NVD-derived entries with manual annotations.

    One entry per (record, product, extracted function). Key collisions
    inside NVD with differing vectors are an error; on an NVD/manual
    collision the NVD entry wins (it is the externally validated one).
    """
    for entry in manual:
        if entry.provenance != "Manual":
            raise ValidationError(
                f"manual entry for {entry.function!r} has provenance {entry.provenance!r}"
            )
    by_key: dict[tuple[str, str, str], GroundTruthEntry] = {}
    for record in filter_records(records, config):
        names = extract_function_names(record.description)
        for _, product, version in record.products:
            for name in names:
                entry = GroundTruthEntry(
                    program=product,
                    version=version,
                    function=name,
                    vector=record.cvss3_vector,
                    provenance="NVD",
                    source_cve=record.id,
                )
                existing = by_key.get(entry.key)
                if existing is not None:
                    if existing.vector != entry.vector:
                        raise ConflictError(
                            f"conflicting vectors for {entry.key} "
                            f"from {existing.source_cve} and {record.id}"
                        )
                    continue
                by_key[entry.key] = entry
    for entry in manual:
        by_key.setdefault(entry.key, entry)
    return sorted(by_key.values(), key=lambda e: e.key)


def ground_truth_to_json(entries: list[GroundTruthEntry]) -> list[dict]:
    out = []
    for e in entries:
        item = {
            "program": e.program,
            "version": e.version,
            "function": e.function,
            "vector": serialize_vector(e.vector),
            "provenance": e.provenance,
        }
        # additive field: keeps NVD entries traceable across a round-trip
        if e.source_cve is not None:
            item["source_cve"] = e.source_cve
        out.append(item)
    return out


def ground_truth_from_json(data: list, provenance: str | None = None) -> list[GroundTruthEntry]:
    """Load ground-truth entries; ``provenance`` forces a value when given
    (manual annotation files may omit the field)."""
    if not isinstance(data, list):
        raise ValidationError("expected a list of entries", path="$")
    entries = []
    for idx, raw in enumerate(data):
        path = f"$[{idx}]"
        if not isinstance(raw, dict):
            raise ValidationError("expected object", path=path)
        try:
            prov = provenance or raw["provenance"]
            entries.append(
                GroundTruthEntry(
                    program=raw["program"],
                    version=raw["version"],
                    function=raw["function"],
                    vector=parse_vector(raw["vector"]),
                    provenance=prov,
                    source_cve=raw.get("source_cve") if prov == "NVD" else None,
                )
            )
        except KeyError as exc:
            raise ValidationError(f"missing field {exc.args[0]}", path=path) from None
    return entries
