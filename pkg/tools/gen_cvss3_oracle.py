#!/usr/bin/env python3
"""Generate fixtures/cvss3_oracle.csv: every CVSS v3.0 base vector with its score.

Reference implementation kept independent of the vulnscore package: all
arithmetic is exact (fractions.Fraction over the decimal weight constants),
and the one-decimal round-up is an exact ceiling on tenths. Do not import
from vulnscore here.
"""

import csv
import itertools
import sys
from fractions import Fraction as F
from pathlib import Path

AV = {"N": F("0.85"), "A": F("0.62"), "L": F("0.55"), "P": F("0.20")}
AC = {"L": F("0.77"), "H": F("0.44")}
PR_UNCHANGED = {"N": F("0.85"), "L": F("0.62"), "H": F("0.27")}
PR_CHANGED = {"N": F("0.85"), "L": F("0.68"), "H": F("0.50")}
UI = {"N": F("0.85"), "R": F("0.62")}
CIA = {"N": F("0"), "L": F("0.22"), "H": F("0.56")}

ORDER = ("AV", "AC", "PR", "UI", "S", "C", "I", "A")
VALUES = {
    "AV": ("N", "A", "L", "P"),
    "AC": ("L", "H"),
    "PR": ("N", "L", "H"),
    "UI": ("N", "R"),
    "S": ("U", "C"),
    "C": ("N", "L", "H"),
    "I": ("N", "L", "H"),
    "A": ("N", "L", "H"),
}


def exact_score(av, ac, pr, ui, s, c, i, a):
    iss = 1 - (1 - CIA[c]) * (1 - CIA[i]) * (1 - CIA[a])
    if s == "U":
        impact = F("6.42") * iss
        pr_weight = PR_UNCHANGED[pr]
    else:
        impact = F("7.52") * (iss - F("0.029")) - F("3.25") * (iss - F("0.02")) ** 15
        pr_weight = PR_CHANGED[pr]
    expl = F("8.22") * AV[av] * AC[ac] * pr_weight * UI[ui]
    if impact <= 0:
        return F(0)
    raw = impact + expl
    if s == "C":
        raw = F("1.08") * raw
    raw = min(raw, F(10))
    tenths = raw * 10
    # exact ceiling of a Fraction
    rounded = -((-tenths) // 1)
    return F(rounded, 10)


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("fixtures/cvss3_oracle.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    rows = 0
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vector", "score"])
        for combo in itertools.product(*(VALUES[m] for m in ORDER)):
            vector = "CVSS:3.0/" + "/".join(f"{m}:{v}" for m, v in zip(ORDER, combo))
            score = exact_score(*combo)
            writer.writerow([vector, f"{float(score):.1f}"])
            rows += 1
    print(f"wrote {rows} rows to {out}")


if __name__ == "__main__":
    main()
