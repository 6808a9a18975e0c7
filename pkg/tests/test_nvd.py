import json
import re

import pytest

from vulnscore.cvss3 import parse_vector, serialize_vector
from vulnscore.errors import ConflictError, ParseError, ValidationError
from vulnscore.nvd import (
    CveRecord,
    GroundTruthEntry,
    IngestConfig,
    build_ground_truth,
    extract_function_names,
    filter_records,
    filter_report,
    ground_truth_from_json,
    ground_truth_to_json,
    parse_nvd_feed,
)

VEC = parse_vector("CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H")


def record(**overrides) -> CveRecord:
    base = dict(
        id="CVE-2000-0001",
        description="Heap-based buffer overflow in the jas_image_readcmpt function in JasPer",
        cwe_ids=("CWE-119",),
        cvss3_vector=VEC,
        cvss3_score=None,
        products=(("jasper_project", "jasper", "1.900.27"),),
    )
    base.update(overrides)
    return CveRecord(**base)


class TestParseNvdFeed:
    def test_empty_feed(self):
        assert parse_nvd_feed('{"CVE_Items": []}') == []

    def test_fixture_feed(self, fixtures_dir):
        records = parse_nvd_feed((fixtures_dir / "nvd_feed.json").read_text())
        assert len(records) == 6
        first = records[0]
        assert first.id == "CVE-2017-90001"
        assert first.cwe_ids == ("CWE-119",)
        assert serialize_vector(first.cvss3_vector) == "CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"
        assert ("autotrace_project", "autotrace", "0.31.1") in first.products

    def test_v2_only_item_has_no_vector(self, fixtures_dir):
        records = parse_nvd_feed((fixtures_dir / "nvd_feed.json").read_text())
        v2_only = next(r for r in records if r.id == "CVE-2017-90002")
        assert v2_only.cvss3_vector is None
        assert v2_only.cvss3_score is None

    def test_malformed_json(self):
        with pytest.raises(ParseError):
            parse_nvd_feed("{oops")

    def test_missing_cve_id(self):
        feed = json.dumps({"CVE_Items": [{"cve": {"CVE_data_meta": {}}}]})
        with pytest.raises(ValidationError, match="ID"):
            parse_nvd_feed(feed)

    def test_score_vector_consistency_enforced(self):
        feed = json.dumps(
            {
                "CVE_Items": [
                    {
                        "cve": {"CVE_data_meta": {"ID": "CVE-1-1"}},
                        "impact": {
                            "baseMetricV3": {
                                "cvssV3": {
                                    "vectorString": "CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H",
                                    "baseScore": 5.0,
                                }
                            }
                        },
                    }
                ]
            }
        )
        with pytest.raises(ValidationError, match="contradicts"):
            parse_nvd_feed(feed)


class TestExtractFunctionNames:
    # a standalone regex oracle, written separately from the implementation
    ORACLE = [
        re.compile(r"in the ([A-Za-z_]\w*) function"),
        re.compile(r"in function ([A-Za-z_]\w*)"),
        re.compile(r"([A-Za-z_]\w*)\(\) function"),
    ]

    def oracle(self, text):
        found = sorted(
            (m.start(1), m.group(1)) for p in self.ORACLE for m in p.finditer(text)
        )
        out = []
        for _, name in found:
            if name not in out:
                out.append(name)
        return out

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("overflow in the jas_image_readcmpt function in JasPer", ["jas_image_readcmpt"]),
            ("denial of service via crafted file", []),
            ("in the foo function and in the bar function", ["foo", "bar"]),
            ("a crash in function png_read_info of libpng", ["png_read_info"]),
            ("the helper() function mishandles input", ["helper"]),
            ("in the foo function, then again in the foo function", ["foo"]),
        ],
    )
    def test_examples_match_oracle(self, text, expected):
        assert extract_function_names(text) == expected
        assert extract_function_names(text) == self.oracle(text)

    def test_no_whitespace_no_duplicates(self, fixtures_dir):
        records = parse_nvd_feed((fixtures_dir / "nvd_feed.json").read_text())
        for r in records:
            names = extract_function_names(r.description)
            assert len(names) == len(set(names))
            assert all(not re.search(r"\s", n) for n in names)


class TestFilterRecords:
    def test_no_cvss3_excluded(self):
        assert filter_records([record(cvss3_vector=None)]) == []

    def test_buffer_overflow_kept(self):
        kept = filter_records([record()])
        assert len(kept) == 1

    def test_xss_excluded(self):
        assert filter_records([record(cwe_ids=("CWE-79",))]) == []

    def test_no_function_name_excluded(self):
        assert filter_records([record(description="overflow via crafted file")]) == []

    def test_product_allowlist(self):
        config = IngestConfig(product_allowlist=frozenset({"autotrace"}))
        assert filter_records([record()], config) == []
        assert len(filter_records([record()], IngestConfig(product_allowlist=frozenset({"jasper"})))) == 1

    def test_idempotent(self, fixtures_dir):
        records = parse_nvd_feed((fixtures_dir / "nvd_feed.json").read_text())
        once = filter_records(records)
        assert filter_records(once) == once

    def test_fixture_counts(self, fixtures_dir):
        records = parse_nvd_feed((fixtures_dir / "nvd_feed.json").read_text())
        config = IngestConfig(product_allowlist=frozenset({"autotrace", "jasper"}))
        kept, counts = filter_report(records, config)
        assert [r.id for r in kept] == ["CVE-2017-90001", "CVE-2017-90006"]
        assert counts == {
            "kept": 2,
            "dropped_no_cvss3": 1,
            "dropped_not_c_program": 1,
            "dropped_not_buffer_overflow": 1,
            "dropped_no_function_name": 1,
        }


class TestBuildGroundTruth:
    def test_empty(self):
        assert build_ground_truth([], []) == []

    def test_union_with_manual(self):
        manual = [
            GroundTruthEntry("other", "1.0", "g", VEC, "Manual"),
        ]
        entries = build_ground_truth([record()], manual)
        assert len(entries) == 2
        assert {e.provenance for e in entries} == {"NVD", "Manual"}

    def test_nvd_wins_key_conflicts(self):
        manual = [
            GroundTruthEntry(
                "jasper", "1.900.27", "jas_image_readcmpt",
                parse_vector("CVSS:3.0/AV:L/AC:L/PR:N/UI:R/S:U/C:N/I:N/A:H"), "Manual",
            )
        ]
        entries = build_ground_truth([record()], manual)
        assert len(entries) == 1
        assert entries[0].provenance == "NVD"
        assert entries[0].vector == VEC

    def test_conflicting_nvd_vectors_error(self):
        other = record(
            id="CVE-2000-0002",
            cvss3_vector=parse_vector("CVSS:3.0/AV:L/AC:L/PR:N/UI:R/S:U/C:N/I:N/A:H"),
        )
        with pytest.raises(ConflictError, match="CVE-2000-0001.*CVE-2000-0002"):
            build_ground_truth([record(), other], [])

    def test_duplicate_nvd_same_vector_collapses(self):
        entries = build_ground_truth([record(), record(id="CVE-2000-0002")], [])
        assert len(entries) == 1

    def test_manual_provenance_enforced(self):
        bad = [GroundTruthEntry("p", "1", "f", VEC, "NVD", source_cve="CVE-1-1")]
        with pytest.raises(ValidationError, match="provenance"):
            build_ground_truth([], bad)

    def test_one_entry_per_product_function(self):
        multi = record(
            description="overflow in the foo function and in the bar function",
            products=(("v", "p1", "1.0"), ("v", "p2", "2.0")),
        )
        entries = build_ground_truth([multi], [])
        assert len(entries) == 4

    def test_nvd_vector_appears_verbatim_in_feed(self, fixtures_dir):
        feed_text = (fixtures_dir / "nvd_feed.json").read_text()
        records = parse_nvd_feed(feed_text)
        config = IngestConfig(product_allowlist=frozenset({"autotrace", "jasper"}))
        entries = build_ground_truth(filter_records(records, config), [])
        assert entries
        for entry in entries:
            assert serialize_vector(entry.vector) in feed_text


class TestGroundTruthJson:
    def test_round_trip(self):
        entries = build_ground_truth([record()], [])
        data = ground_truth_to_json(entries)
        again = ground_truth_from_json(data)
        assert again == entries

    def test_manual_file_without_provenance_field(self):
        data = [
            {
                "program": "p",
                "version": "1",
                "function": "f",
                "vector": serialize_vector(VEC),
            }
        ]
        entries = ground_truth_from_json(data, provenance="Manual")
        assert entries[0].provenance == "Manual"

    def test_missing_field_named(self):
        with pytest.raises(ValidationError, match="vector"):
            ground_truth_from_json(
                [{"program": "p", "version": "1", "function": "f", "provenance": "Manual"}]
            )
