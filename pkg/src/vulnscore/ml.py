"""Per-metric severity classifiers: datasets, learners, voting ensembles.

Each of the eight base metrics gets its own voting ensemble of ten
cross-validated classifiers (one per seed). Random forests and Gaussian
naive Bayes are implemented here directly so that trained models serialize
to a stable JSON document and identical seeds reproduce identical bytes.
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .cvss3 import METRIC_ORDER, SEVERITY_ORDER, Cvss3Vector
from .errors import ValidationError
from .features import FEATURE_MODES, FeatureVector

MODEL_FORMAT = "vulnscore-model/1"
ENSEMBLE_SIZE = 10


@dataclass(frozen=True)
class LabeledExample:
    """One ground-truth row: a keyed feature vector with its eight labels."""

    key: tuple[str, str, str]  # (program, version, function)
    features: FeatureVector
    labels: Cvss3Vector


class Dataset:
    """An ordered collection of labeled examples with a fixed feature mode."""

    def __init__(self, examples, feature_mode: str = "extended10"):
        if feature_mode not in FEATURE_MODES:
            raise ValueError(f"unknown feature mode {feature_mode!r}")
        examples = tuple(examples)
        keys = [e.key for e in examples]
        if len(set(keys)) != len(keys):
            dup = next(k for k in keys if keys.count(k) > 1)
            raise ValidationError(f"duplicate dataset key {dup}")
        self.examples = examples
        self.feature_mode = feature_mode

    def __len__(self) -> int:
        return len(self.examples)

    @property
    def n_features(self) -> int:
        return len(FEATURE_MODES[self.feature_mode])

    def matrix(self) -> np.ndarray:
        return np.array(
            [e.features.values(self.feature_mode) for e in self.examples], dtype=float
        ).reshape(len(self.examples), self.n_features)

    def labels_for(self, metric: str) -> list[str]:
        return [e.labels.get(metric) for e in self.examples]

    def subset(self, indices) -> "Dataset":
        return Dataset([self.examples[i] for i in indices], self.feature_mode)

    def digest(self) -> str:
        """Stable fingerprint of the training data (order-insensitive)."""
        canonical = [
            {
                "key": list(e.key),
                "features": list(e.features.values("extended10")),
                "labels": str(e.labels),
            }
            for e in sorted(self.examples, key=lambda e: e.key)
        ]
        payload = json.dumps(
            {"feature_mode": self.feature_mode, "examples": canonical},
            sort_keys=True,
            separators=(",", ":"),
        )
        return "sha256:" + hashlib.sha256(payload.encode()).hexdigest()


def split_dataset(d: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic shuffle-then-cut; train gets floor(fraction * n) examples."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if len(d) < 2:
        raise ValueError("dataset too small to split (need at least 2 examples)")
    perm = np.random.default_rng(seed).permutation(len(d))
    cut = int(train_fraction * len(d))
    return d.subset(perm[:cut]), d.subset(perm[cut:])


def kfold(train: Dataset, k: int, seed: int) -> list[tuple[Dataset, Dataset]]:
    """K near-equal disjoint folds; pair i holds out fold i for validation."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    n = len(train)
    if k > n:
        raise ValueError(f"cannot make {k} folds from {n} examples")
    perm = np.random.default_rng(seed).permutation(n)
    base, extra = divmod(n, k)
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(perm[start : start + size])
        start += size
    pairs = []
    for i in range(k):
        held_out = folds[i]
        rest = np.concatenate([folds[j] for j in range(k) if j != i])
        pairs.append((train.subset(rest), train.subset(held_out)))
    return pairs


# ---------------------------------------------------------------------------
# Decision tree / random forest
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RandomForestParams:
    n_trees: int = 100
    max_depth: int = 16
    min_leaf: int = 1
    max_features: str = "sqrt"  # per-split feature subsample of ceil(sqrt(d))


@dataclass(frozen=True)
class NaiveBayesParams:
    var_smoothing: float = 1e-9  # scaled by the largest feature variance


def _gini_best_split(X, y, n_classes, feature_ids, min_leaf):
    """Best (feature, threshold, weighted gini) over the candidate features.

    Vectorized over split positions: sort per feature, prefix class counts,
    score every boundary between distinct values.
    """
    n = len(y)
    best = None  # (score, feature, threshold)
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y] = 1.0
    total = onehot.sum(axis=0)
    nl = np.arange(1, n, dtype=float)
    nr = n - nl
    size_ok = (nl >= min_leaf) & (nr >= min_leaf)
    for f in feature_ids:
        values = X[:, f]
        order = np.argsort(values, kind="stable")
        xs = values[order]
        if xs[0] == xs[-1]:
            continue
        left = np.cumsum(onehot[order], axis=0)[:-1]  # class counts left of each boundary
        right = total - left
        gini_l = 1.0 - np.sum((left / nl[:, None]) ** 2, axis=1)
        gini_r = 1.0 - np.sum((right / nr[:, None]) ** 2, axis=1)
        score = (nl * gini_l + nr * gini_r) / n
        score[~((xs[:-1] < xs[1:]) & size_ok)] = np.inf
        pos = int(np.argmin(score))
        if np.isinf(score[pos]):
            continue
        if best is None or score[pos] < best[0]:
            threshold = (xs[pos] + xs[pos + 1]) / 2.0
            best = (float(score[pos]), int(f), threshold)
    return best


def _build_tree(X, y, n_classes, rng, params, depth=0):
    counts = np.bincount(y, minlength=n_classes)
    if (
        depth >= params.max_depth
        or len(y) < 2 * params.min_leaf
        or counts.max() == len(y)
    ):
        return {"leaf": int(np.argmax(counts))}
    d = X.shape[1]
    if params.max_features == "sqrt":
        m = int(np.ceil(np.sqrt(d)))
    else:
        m = d
    feature_ids = np.sort(rng.choice(d, size=min(m, d), replace=False))
    best = _gini_best_split(X, y, n_classes, feature_ids, params.min_leaf)
    if best is None:
        return {"leaf": int(np.argmax(counts))}
    _, feature, threshold = best
    mask = X[:, feature] <= threshold
    return {
        "feature": feature,
        "threshold": threshold,
        "left": _build_tree(X[mask], y[mask], n_classes, rng, params, depth + 1),
        "right": _build_tree(X[~mask], y[~mask], n_classes, rng, params, depth + 1),
    }


def _tree_predict(node, x) -> int:
    while "leaf" not in node:
        node = node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]
    return node["leaf"]


class RandomForestClassifier:
    """Bagged Gini decision trees over a fixed class order.

    ``classes`` is severity-ordered (most severe first) so that argmax tie
    breaking is conservative everywhere.
    """

    kind = "rf"

    def __init__(self, classes, trees, params: RandomForestParams, seed: int):
        self.classes = tuple(classes)
        self.trees = trees
        self.params = params
        self.seed = seed

    @classmethod
    def fit(cls, X, labels, classes, params: RandomForestParams, seed: int):
        index = {c: i for i, c in enumerate(classes)}
        y = np.array([index[label] for label in labels])
        n = len(y)
        rng = np.random.default_rng(seed)
        tree_seeds = rng.integers(0, 2**63 - 1, size=params.n_trees)
        trees = []
        for tree_seed in tree_seeds:
            tree_rng = np.random.default_rng(int(tree_seed))
            sample = tree_rng.integers(0, n, size=n)
            trees.append(_build_tree(X[sample], y[sample], len(classes), tree_rng, params))
        return cls(classes, trees, params, seed)

    def predict_one(self, x) -> str:
        votes = np.zeros(len(self.classes), dtype=int)
        for tree in self.trees:
            votes[_tree_predict(tree, x)] += 1
        return self.classes[int(np.argmax(votes))]

    def to_json(self) -> dict:
        def encode(node):
            if "leaf" in node:
                return {"leaf_label": self.classes[node["leaf"]]}
            return {
                "feature_index": node["feature"],
                "threshold": node["threshold"],
                "left": encode(node["left"]),
                "right": encode(node["right"]),
            }

        return {
            "kind": self.kind,
            "classes": list(self.classes),
            "seed": self.seed,
            "params": {
                "n_trees": self.params.n_trees,
                "max_depth": self.params.max_depth,
                "min_leaf": self.params.min_leaf,
                "max_features": self.params.max_features,
            },
            "trees": [encode(tree) for tree in self.trees],
        }

    @classmethod
    def from_json(cls, data: dict):
        classes = tuple(data["classes"])
        index = {c: i for i, c in enumerate(classes)}

        def decode(node):
            if "leaf_label" in node:
                return {"leaf": index[node["leaf_label"]]}
            return {
                "feature": node["feature_index"],
                "threshold": node["threshold"],
                "left": decode(node["left"]),
                "right": decode(node["right"]),
            }

        params = RandomForestParams(**data["params"])
        return cls(classes, [decode(t) for t in data["trees"]], params, data["seed"])


class GaussianNBClassifier:
    """Gaussian class-conditional naive Bayes with variance smoothing."""

    kind = "nb"

    def __init__(self, classes, priors, means, variances, seed: int):
        self.classes = tuple(classes)
        self.priors = np.asarray(priors, dtype=float)
        self.means = np.asarray(means, dtype=float)
        self.variances = np.asarray(variances, dtype=float)
        self.seed = seed

    @classmethod
    def fit(cls, X, labels, classes, params: NaiveBayesParams, seed: int):
        y = np.array([classes.index(label) for label in labels])
        # smoothing keeps zero-variance features finite
        global_var = X.var(axis=0).max() if X.size else 0.0
        eps = params.var_smoothing * (global_var if global_var > 0 else 1.0)
        priors, means, variances = [], [], []
        for ci in range(len(classes)):
            rows = X[y == ci]
            if len(rows) == 0:
                priors.append(0.0)
                means.append(np.zeros(X.shape[1]))
                variances.append(np.full(X.shape[1], eps))
                continue
            priors.append(len(rows) / len(y))
            means.append(rows.mean(axis=0))
            variances.append(rows.var(axis=0) + eps)
        return cls(classes, priors, means, variances, seed)

    def predict_one(self, x) -> str:
        x = np.asarray(x, dtype=float)
        best_index = 0
        best_score = -np.inf
        for ci in range(len(self.classes)):
            if self.priors[ci] == 0.0:
                continue
            var = self.variances[ci]
            log_lik = -0.5 * np.sum(np.log(2.0 * np.pi * var))
            log_lik -= 0.5 * np.sum((x - self.means[ci]) ** 2 / var)
            score = np.log(self.priors[ci]) + log_lik
            if score > best_score:
                best_score = score
                best_index = ci
        return self.classes[best_index]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "classes": list(self.classes),
            "seed": self.seed,
            "priors": self.priors.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict):
        return cls(
            tuple(data["classes"]),
            data["priors"],
            data["means"],
            data["variances"],
            data["seed"],
        )


_CLASSIFIER_KINDS = {"rf": RandomForestClassifier, "nb": GaussianNBClassifier}
_DEFAULT_PARAMS = {"rf": RandomForestParams, "nb": NaiveBayesParams}


def _severity_classes(metric: str, labels) -> tuple[str, ...]:
    observed = set(labels)
    return tuple(v for v in SEVERITY_ORDER[metric] if v in observed)


def train_random_forest(
    train: Dataset, metric: str, params: RandomForestParams | None = None, seed: int = 0
) -> RandomForestClassifier:
    """Fit one random forest predicting ``metric`` from the dataset's features."""
    if len(train) == 0:
        raise ValueError("cannot train on an empty dataset")
    params = params or RandomForestParams()
    labels = train.labels_for(metric)
    return RandomForestClassifier.fit(
        train.matrix(), labels, _severity_classes(metric, labels), params, seed
    )


def train_naive_bayes(
    train: Dataset, metric: str, params: NaiveBayesParams | None = None, seed: int = 0
) -> GaussianNBClassifier:
    """Fit one Gaussian naive Bayes classifier for ``metric``."""
    if len(train) == 0:
        raise ValueError("cannot train on an empty dataset")
    params = params or NaiveBayesParams()
    labels = train.labels_for(metric)
    return GaussianNBClassifier.fit(
        train.matrix(), labels, _severity_classes(metric, labels), params, seed
    )


_TRAINERS = {"rf": train_random_forest, "nb": train_naive_bayes}


def _classifier_accuracy(clf, dataset: Dataset, metric: str) -> float:
    X = dataset.matrix()
    labels = dataset.labels_for(metric)
    hits = sum(1 for x, label in zip(X, labels) if clf.predict_one(x) == label)
    return hits / len(labels)


def cross_validate(
    train: Dataset, metric: str, k: int, algo: str, params=None, seed: int = 0
):
    """Train one classifier per fold pair and keep the best-validating one.

    Ties break toward the lowest fold index.
    """
    trainer = _TRAINERS[algo]
    best_clf = None
    best_acc = -1.0
    for fold_train, fold_validate in kfold(train, k, seed):
        clf = trainer(fold_train, metric, params, seed)
        acc = _classifier_accuracy(clf, fold_validate, metric)
        if acc > best_acc:
            best_acc = acc
            best_clf = clf
    return best_clf


def majority_vote(ensemble, x, metric: str) -> str:
    """Most frequent prediction; ties break toward the more severe value."""
    if not ensemble:
        raise ValueError("ensemble must not be empty")
    votes: dict[str, int] = {}
    for clf in ensemble:
        value = clf.predict_one(x)
        votes[value] = votes.get(value, 0) + 1
    top = max(votes.values())
    for value in SEVERITY_ORDER[metric]:
        if votes.get(value) == top:
            return value
    raise ValueError(f"ensemble produced no value allowed for {metric}")  # unreachable


@dataclass
class TrainedModelSet:
    """Eight voting ensembles (one per metric) of ten seed winners each."""

    per_metric: dict[str, list]
    algorithm: str
    seeds: tuple[int, ...]
    feature_mode: str
    kfolds: int
    training_digest: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if set(self.per_metric) != set(METRIC_ORDER):
            raise ValidationError("model set must cover exactly the eight base metrics")
        for metric, ensemble in self.per_metric.items():
            if len(ensemble) != ENSEMBLE_SIZE:
                raise ValidationError(
                    f"ensemble for {metric} has {len(ensemble)} members, need {ENSEMBLE_SIZE}"
                )

    def _project(self, x) -> np.ndarray:
        if isinstance(x, FeatureVector):
            return np.asarray(x.values(self.feature_mode), dtype=float)
        arr = np.asarray(x, dtype=float)
        expected = len(FEATURE_MODES[self.feature_mode])
        if arr.shape != (expected,):
            raise ValueError(
                f"feature dimensionality {arr.shape} does not match "
                f"mode {self.feature_mode} (expected {expected})"
            )
        return arr

    def predict_metric(self, metric: str, x) -> str:
        return majority_vote(self.per_metric[metric], self._project(x), metric)

    def predict_metrics(self, x) -> Cvss3Vector:
        """Assemble the full base vector from the per-metric ensembles."""
        projected = self._project(x)
        return Cvss3Vector(
            *(majority_vote(self.per_metric[m], projected, m) for m in METRIC_ORDER)
        )

    def accuracy(self, test: Dataset, metric: str) -> float:
        """Fraction of test examples whose voted prediction matches the label."""
        if len(test) == 0:
            raise ValueError("cannot evaluate accuracy on an empty dataset")
        X = test.matrix()
        labels = test.labels_for(metric)
        hits = sum(
            1
            for x, label in zip(X, labels)
            if majority_vote(self.per_metric[metric], x, metric) == label
        )
        return hits / len(labels)

    def accuracy_report(self, test: Dataset) -> dict[str, float]:
        return {metric: self.accuracy(test, metric) for metric in METRIC_ORDER}

    def to_json(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "algorithm": self.algorithm,
            "seeds": list(self.seeds),
            "feature_mode": self.feature_mode,
            "kfolds": self.kfolds,
            "training_digest": self.training_digest,
            "params": self.params,
            "metrics": {
                metric: [clf.to_json() for clf in ensemble]
                for metric, ensemble in sorted(self.per_metric.items())
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "TrainedModelSet":
        if data.get("format") != MODEL_FORMAT:
            raise ValidationError(f"unsupported model format {data.get('format')!r}")
        per_metric = {
            metric: [_CLASSIFIER_KINDS[c["kind"]].from_json(c) for c in ensemble]
            for metric, ensemble in data["metrics"].items()
        }
        return cls(
            per_metric=per_metric,
            algorithm=data["algorithm"],
            seeds=tuple(data["seeds"]),
            feature_mode=data["feature_mode"],
            kfolds=data["kfolds"],
            training_digest=data["training_digest"],
            params=data.get("params", {}),
        )


def train_model_set(
    train: Dataset,
    algo: str,
    k: int,
    seeds,
    params=None,
    jobs: int = 1,
) -> TrainedModelSet:
    """Train the full model set: per metric, one cross-validated winner per seed.

    The ten members of each ensemble derive their randomness solely from
    their own seed, so parallel training cannot change results.
    """
    seeds = tuple(int(s) for s in seeds)
    if len(seeds) != ENSEMBLE_SIZE:
        raise ValueError(f"need exactly {ENSEMBLE_SIZE} seeds, got {len(seeds)}")
    if algo not in _TRAINERS:
        raise ValueError(f"unknown algorithm {algo!r} (expected 'rf' or 'nb')")

    def one(metric_seed):
        metric, seed = metric_seed
        return cross_validate(train, metric, k, algo, params, seed)

    tasks = [(metric, seed) for metric in METRIC_ORDER for seed in seeds]
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, tasks))
    else:
        results = [one(task) for task in tasks]

    per_metric: dict[str, list] = {}
    for (metric, _), clf in zip(tasks, results):
        per_metric.setdefault(metric, []).append(clf)

    actual_params = params or _DEFAULT_PARAMS[algo]()
    return TrainedModelSet(
        per_metric=per_metric,
        algorithm=algo,
        seeds=seeds,
        feature_mode=train.feature_mode,
        kfolds=k,
        training_digest=train.digest(),
        params={k_: v for k_, v in vars(actual_params).items()},
    )
