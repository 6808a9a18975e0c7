import math

import pytest

from vulnscore.cvss3 import (
    METRIC_ORDER,
    METRIC_VALUES,
    Cvss3Vector,
    base_score,
    enumerate_vectors,
    parse_vector,
    rating_of,
    serialize_vector,
)
from vulnscore.errors import ParseError

CRITICAL = "CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"


class TestParseVector:
    def test_parses_letters(self):
        v = parse_vector(CRITICAL)
        assert (v.av, v.ac, v.pr, v.ui, v.s, v.c, v.i, v.a) == (
            "N", "L", "N", "N", "U", "H", "H", "H",
        )

    def test_missing_prefix(self):
        with pytest.raises(ParseError, match="prefix"):
            parse_vector("AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H")

    def test_unknown_value(self):
        with pytest.raises(ParseError, match="AV:X"):
            parse_vector("CVSS:3.0/AV:X/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H")

    def test_unknown_metric_key(self):
        with pytest.raises(ParseError, match="ZZ:N"):
            parse_vector("CVSS:3.0/ZZ:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H")

    def test_duplicate_metric(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_vector("CVSS:3.0/AV:N/AV:L/PR:N/UI:N/S:U/C:H/I:H/A:H")

    def test_missing_metric(self):
        with pytest.raises(ParseError, match="missing metric A"):
            parse_vector("CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H")

    def test_out_of_order(self):
        with pytest.raises(ParseError, match="order"):
            parse_vector("CVSS:3.0/AC:L/AV:N/PR:N/UI:N/S:U/C:H/I:H/A:H")

    def test_round_trip_all_vectors(self):
        for v in enumerate_vectors():
            assert parse_vector(serialize_vector(v)) == v

    def test_minimal_vector_round_trip(self):
        text = "CVSS:3.0/AV:P/AC:H/PR:H/UI:R/S:U/C:N/I:N/A:N"
        assert serialize_vector(parse_vector(text)) == text


class TestSerializeVector:
    def test_all_maximal(self):
        v = Cvss3Vector("N", "L", "N", "N", "C", "H", "H", "H")
        assert serialize_vector(v) == "CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:C/C:H/I:H/A:H"

    def test_distinct_vectors_distinct_strings(self):
        strings = {serialize_vector(v) for v in enumerate_vectors()}
        assert len(strings) == 2592


class TestBaseScore:
    def test_zero_impact_is_zero(self):
        v = parse_vector("CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:N")
        score = base_score(v)
        assert score.value == 0.0
        assert score.rating == "None"

    def test_known_critical(self):
        assert base_score(parse_vector(CRITICAL)).value == 9.8

    def test_known_changed_scope(self):
        v = parse_vector("CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:C/C:H/I:H/A:H")
        assert base_score(v).value == 10.0

    def test_oracle_equivalence(self, cvss3_oracle):
        for v in enumerate_vectors():
            expected = cvss3_oracle[serialize_vector(v)]
            assert base_score(v).value == pytest.approx(expected, abs=1e-12)

    def test_range_and_granularity(self):
        for v in enumerate_vectors():
            value = base_score(v).value
            assert 0.0 <= value <= 10.0
            tenths = value * 10
            assert abs(tenths - round(tenths)) < 1e-9

    def test_zero_iff_no_impact(self):
        for v in enumerate_vectors():
            zero = v.c == "N" and v.i == "N" and v.a == "N"
            assert (base_score(v).value == 0.0) == zero

    def test_scope_unchanged_monotonic_in_impact(self):
        ladder = {"N": 0, "L": 1, "H": 2}
        for v in enumerate_vectors():
            if v.s != "U":
                continue
            for metric in ("C", "I", "A"):
                current = v.get(metric)
                if ladder[current] == 2:
                    continue
                bumped = v.with_value(
                    metric, {0: "L", 1: "H"}[ladder[current]]
                )
                assert base_score(bumped).value >= base_score(v).value

    def test_round_up_property(self):
        # recompute the unrounded sum and compare with the reported value
        from vulnscore.cvss3 import _AC_WEIGHT, _AV_WEIGHT, _CIA_WEIGHT, _PR_WEIGHT, _UI_WEIGHT

        for v in enumerate_vectors():
            iss = 1 - (1 - _CIA_WEIGHT[v.c]) * (1 - _CIA_WEIGHT[v.i]) * (1 - _CIA_WEIGHT[v.a])
            if v.s == "U":
                impact = 6.42 * iss
            else:
                impact = 7.52 * (iss - 0.029) - 3.25 * (iss - 0.02) ** 15
            if impact <= 0:
                continue
            expl = 8.22 * _AV_WEIGHT[v.av] * _AC_WEIGHT[v.ac] * _PR_WEIGHT[v.s][v.pr] * _UI_WEIGHT[v.ui]
            raw = min(impact + expl if v.s == "U" else 1.08 * (impact + expl), 10.0)
            value = base_score(v).value
            assert value >= raw - 1e-9
            assert value - raw < 0.1


class TestRating:
    @pytest.mark.parametrize(
        "value,rating",
        [(0.0, "None"), (0.1, "Low"), (3.9, "Low"), (4.0, "Medium"),
         (6.9, "Medium"), (7.0, "High"), (8.9, "High"), (9.0, "Critical"), (10.0, "Critical")],
    )
    def test_bands(self, value, rating):
        assert rating_of(value) == rating


def test_invalid_vector_construction():
    with pytest.raises(ValueError, match="AV"):
        Cvss3Vector("X", "L", "N", "N", "U", "H", "H", "H")


def test_metric_tables_consistent():
    assert len(list(enumerate_vectors())) == math.prod(
        len(METRIC_VALUES[m]) for m in METRIC_ORDER
    )
