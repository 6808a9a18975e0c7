#!/usr/bin/env python3
# CVSS v3.0 base vectors: parsing, scoring, and what moves the needle.

from vulnscore.cvss3 import base_score, enumerate_vectors, parse_vector, serialize_vector

# A classic remote heap overflow: network attackable, no privileges, full
# impact on confidentiality, integrity and availability.
critical = parse_vector("CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H")
print(serialize_vector(critical), "->", base_score(critical))

# Scope change pushes the same impacts over the top.
changed = critical.with_value("S", "C")
print(serialize_vector(changed), "->", base_score(changed))

# No impact at all always scores 0.0, regardless of exploitability.
harmless = parse_vector("CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:N")
print(serialize_vector(harmless), "->", base_score(harmless))

# Walking availability impact down one step at a time.
print("\navailability ladder (everything else fixed):")
for a in ("H", "L", "N"):
    v = critical.with_value("A", a)
    score = base_score(v)
    print(f"  A:{a}  ->  {score.value:4.1f}  {score.rating}")

# The full base-vector space is small enough to sweep: 2,592 vectors.
scores = [base_score(v).value for v in enumerate_vectors()]
print(f"\nall {len(scores)} vectors: min {min(scores)}, max {max(scores)}")
buckets = {}
for v in enumerate_vectors():
    rating = base_score(v).rating
    buckets[rating] = buckets.get(rating, 0) + 1
for rating in ("None", "Low", "Medium", "High", "Critical"):
    print(f"  {rating:>8}: {buckets.get(rating, 0):4d} vectors")
