"""Seeded synthetic corpora with planted per-metric labeling rules.

Scored ground truth at realistic scale lives outside this repository, so the learners are
exercised on generated datasets where every metric follows a known
deterministic rule over the features. One rule (availability impact)
depends solely on the pointer-parameter count, an extended-mode feature,
which makes the original7/extended10 accuracy gap observable.
"""

import numpy as np

from .cvss3 import Cvss3Vector
from .features import FeatureVector
from .ml import Dataset, LabeledExample

#: The metric whose planted rule uses a feature outside the original seven.
EXTENDED_ONLY_METRIC = "A"


def planted_labels(v: FeatureVector) -> Cvss3Vector:
    """The deterministic labeling rule applied to every synthetic example."""
    if v.di <= 1:
        av = "N"
    elif v.di == 2:
        av = "A"
    elif v.di <= 4:
        av = "L"
    else:
        av = "P"
    ac = "L" if v.cc >= 0.5 else "H"
    if v.d_in >= 4:
        pr = "N"
    elif v.d_in >= 2:
        pr = "L"
    else:
        pr = "H"
    ui = "N" if v.nv >= 2 else "R"
    s = "C" if v.li >= 3 else "U"
    if v.nl < 1.0:
        c = "H"
    elif v.nl < 2.5:
        c = "L"
    else:
        c = "N"
    if v.s >= 300:
        i = "H"
    elif v.s >= 120:
        i = "L"
    else:
        i = "N"
    a = "H" if v.pt >= 3 else "N"  # depends only on pt
    return Cvss3Vector(av, ac, pr, ui, s, c, i, a)


def planted_rule_corpus(
    n: int = 200, seed: int = 0, feature_mode: str = "extended10"
) -> Dataset:
    """Generate ``n`` labeled examples with independently sampled features."""
    rng = np.random.default_rng(seed)
    examples = []
    for idx in range(n):
        vec = FeatureVector(
            d_in=int(rng.integers(0, 7)),
            d_out=int(rng.integers(0, 7)),
            di=int(rng.integers(0, 7)),
            cc=float(rng.integers(0, 11)) / 10.0,
            nl=float(rng.integers(0, 41)) / 10.0,
            nv=int(rng.integers(1, 5)),
            li=int(rng.integers(1, 6)),
            s=int(rng.integers(10, 501)),
            fx=int(rng.integers(1, 51)),
            pt=int(rng.integers(0, 7)),
        )
        examples.append(
            LabeledExample(
                key=("synthetic", "1.0", f"fn_{idx:04d}"),
                features=vec,
                labels=planted_labels(vec),
            )
        )
    return Dataset(examples, feature_mode)
