"""CVSS v3.0 base vectors: parsing, serialization, and base-score computation.

Only the base metric group is modelled. Metric values are kept as the
single-letter codes used by the vector string notation ("N", "L", ...);
``VALUE_NAMES`` maps them to the human-readable names for display surfaces.
"""

import itertools
import math
from dataclasses import dataclass, replace

from .errors import ParseError

VECTOR_PREFIX = "CVSS:3.0"

#: Base metrics in specification order.
METRIC_ORDER = ("AV", "AC", "PR", "UI", "S", "C", "I", "A")

#: Allowed value letters per metric, in specification order.
METRIC_VALUES = {
    "AV": ("N", "A", "L", "P"),
    "AC": ("L", "H"),
    "PR": ("N", "L", "H"),
    "UI": ("N", "R"),
    "S": ("U", "C"),
    "C": ("N", "L", "H"),
    "I": ("N", "L", "H"),
    "A": ("N", "L", "H"),
}

#: Letter code to display name.
VALUE_NAMES = {
    "AV": {"N": "Network", "A": "Adjacent", "L": "Local", "P": "Physical"},
    "AC": {"L": "Low", "H": "High"},
    "PR": {"N": "None", "L": "Low", "H": "High"},
    "UI": {"N": "None", "R": "Required"},
    "S": {"U": "Unchanged", "C": "Changed"},
    "C": {"N": "None", "L": "Low", "H": "High"},
    "I": {"N": "None", "L": "Low", "H": "High"},
    "A": {"N": "None", "L": "Low", "H": "High"},
}

#: Per-metric value order from most to least severe. Used to break majority
#: voting ties conservatively (over-warning beats under-warning). Note that
#: for AC a *low* complexity is the more severe case.
SEVERITY_ORDER = {
    "AV": ("N", "A", "L", "P"),
    "AC": ("L", "H"),
    "PR": ("N", "L", "H"),
    "UI": ("N", "R"),
    "S": ("C", "U"),
    "C": ("H", "L", "N"),
    "I": ("H", "L", "N"),
    "A": ("H", "L", "N"),
}

# Numeric weights fixed by the CVSS v3.0 specification. PR weighs differently
# when scope is changed.
_AV_WEIGHT = {"N": 0.85, "A": 0.62, "L": 0.55, "P": 0.20}
_AC_WEIGHT = {"L": 0.77, "H": 0.44}
_PR_WEIGHT = {
    "U": {"N": 0.85, "L": 0.62, "H": 0.27},
    "C": {"N": 0.85, "L": 0.68, "H": 0.50},
}
_UI_WEIGHT = {"N": 0.85, "R": 0.62}
_CIA_WEIGHT = {"N": 0.0, "L": 0.22, "H": 0.56}

_FIELD_FOR_METRIC = {
    "AV": "av", "AC": "ac", "PR": "pr", "UI": "ui",
    "S": "s", "C": "c", "I": "i", "A": "a",
}


@dataclass(frozen=True)
class Cvss3Vector:
    """The eight CVSS v3.0 base metrics, each one allowed letter code."""

    av: str
    ac: str
    pr: str
    ui: str
    s: str
    c: str
    i: str
    a: str

    def __post_init__(self):
        for metric in METRIC_ORDER:
            value = self.get(metric)
            if value not in METRIC_VALUES[metric]:
                raise ValueError(
                    f"invalid value {value!r} for metric {metric}; "
                    f"allowed: {'/'.join(METRIC_VALUES[metric])}"
                )

    def get(self, metric: str) -> str:
        """Return the letter value of a metric named by its code (e.g. "AV")."""
        return getattr(self, _FIELD_FOR_METRIC[metric])

    def with_value(self, metric: str, value: str) -> "Cvss3Vector":
        """Return a copy with one metric replaced; validation re-runs."""
        return replace(self, **{_FIELD_FOR_METRIC[metric]: value})

    def __str__(self) -> str:
        return serialize_vector(self)


@dataclass(frozen=True)
class Cvss3Score:
    """Aggregate base score: a one-decimal value in [0.0, 10.0] and its rating band."""

    value: float
    rating: str


def rating_of(value: float) -> str:
    """Qualitative severity band of a base score."""
    if value == 0.0:
        return "None"
    if value <= 3.9:
        return "Low"
    if value <= 6.9:
        return "Medium"
    if value <= 8.9:
        return "High"
    return "Critical"


def parse_vector(text: str) -> Cvss3Vector:
    """Parse a canonical "CVSS:3.0/AV:x/AC:x/PR:x/UI:x/S:x/C:x/I:x/A:x" string.

    The prefix is mandatory and metrics must appear exactly once each, in
    specification order. Raises :class:`ParseError` naming the offending token.
    """
    parts = text.strip().split("/")
    if not parts or parts[0] != VECTOR_PREFIX:
        raise ParseError(f"missing or wrong prefix (expected {VECTOR_PREFIX!r}): {parts[0]!r}")
    seen: dict[str, str] = {}
    for token in parts[1:]:
        key, sep, value = token.partition(":")
        if not sep:
            raise ParseError(f"malformed metric token {token!r}")
        if key not in METRIC_VALUES:
            raise ParseError(f"unknown metric key in token {token!r}")
        if key in seen:
            raise ParseError(f"duplicate metric in token {token!r}")
        if value not in METRIC_VALUES[key]:
            raise ParseError(f"unknown value in token {token!r}")
        seen[key] = value
    missing = [m for m in METRIC_ORDER if m not in seen]
    if missing:
        raise ParseError(f"missing metric {missing[0]}")
    if list(seen) != list(METRIC_ORDER):
        raise ParseError("metrics out of specification order")
    return Cvss3Vector(*(seen[m] for m in METRIC_ORDER))


def serialize_vector(v: Cvss3Vector) -> str:
    """Canonical vector string, metrics in specification order."""
    body = "/".join(f"{m}:{v.get(m)}" for m in METRIC_ORDER)
    return f"{VECTOR_PREFIX}/{body}"


def _round_up_tenths(x: float) -> float:
    # Ceiling to one decimal, computed on tenths with floating noise below
    # 1e-9 clamped so that products of the decimal weights round exactly.
    return math.ceil(x * 10.0 - 1e-9) / 10.0


def base_score(v: Cvss3Vector) -> Cvss3Score:
    """Compute the CVSS v3.0 base score of a vector.

    ISS = 1 - (1-C)(1-I)(1-A); Impact is 6.42*ISS for unchanged scope and
    7.52*(ISS-0.029) - 3.25*(ISS-0.02)^15 for changed scope; Exploitability
    is 8.22*AV*AC*PR*UI. A non-positive impact scores 0.0; otherwise the sum
    (scaled by 1.08 for changed scope) is capped at 10 and rounded up to one
    decimal.
    """
    iss = 1.0 - (1.0 - _CIA_WEIGHT[v.c]) * (1.0 - _CIA_WEIGHT[v.i]) * (1.0 - _CIA_WEIGHT[v.a])
    if v.s == "U":
        impact = 6.42 * iss
    else:
        impact = 7.52 * (iss - 0.029) - 3.25 * (iss - 0.02) ** 15
    exploitability = (
        8.22 * _AV_WEIGHT[v.av] * _AC_WEIGHT[v.ac] * _PR_WEIGHT[v.s][v.pr] * _UI_WEIGHT[v.ui]
    )
    if impact <= 0.0:
        return Cvss3Score(0.0, rating_of(0.0))
    raw = impact + exploitability
    if v.s == "C":
        raw = 1.08 * raw
    value = _round_up_tenths(min(raw, 10.0))
    return Cvss3Score(value, rating_of(value))


def enumerate_vectors():
    """Yield all 2,592 possible base vectors in lexicographic metric order."""
    for combo in itertools.product(*(METRIC_VALUES[m] for m in METRIC_ORDER)):
        yield Cvss3Vector(*combo)
