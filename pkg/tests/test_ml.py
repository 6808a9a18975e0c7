import json

import numpy as np
import pytest

from vulnscore.cvss3 import METRIC_ORDER, METRIC_VALUES, Cvss3Vector, parse_vector
from vulnscore.errors import ValidationError
from vulnscore.features import FeatureVector
from vulnscore.ml import (
    Dataset,
    GaussianNBClassifier,
    LabeledExample,
    RandomForestClassifier,
    RandomForestParams,
    TrainedModelSet,
    cross_validate,
    kfold,
    majority_vote,
    split_dataset,
    train_model_set,
    train_naive_bayes,
    train_random_forest,
)
from vulnscore.synthetic import EXTENDED_ONLY_METRIC, planted_labels, planted_rule_corpus

LOW_VEC = parse_vector("CVSS:3.0/AV:L/AC:H/PR:H/UI:R/S:U/C:L/I:L/A:L")
HIGH_VEC = parse_vector("CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H")

FAST_RF = RandomForestParams(n_trees=20, max_depth=10)


def make_example(i, li=1, labels=LOW_VEC):
    features = FeatureVector(
        d_in=i % 4, d_out=(i + 1) % 4, di=i % 5, cc=(i % 10) / 10.0,
        nl=float(i % 3), nv=1, li=li, s=10 + i, fx=1 + i % 7, pt=i % 5,
    )
    return LabeledExample(("prog", "1", f"fn{i}"), features, labels)


def small_dataset(n=8):
    return Dataset([make_example(i) for i in range(n)])


class TestDataset:
    def test_unique_keys_enforced(self):
        with pytest.raises(ValidationError, match="duplicate"):
            Dataset([make_example(1), make_example(1)])

    def test_matrix_shapes(self):
        d10 = small_dataset()
        d7 = Dataset(d10.examples, "original7")
        assert d10.matrix().shape == (8, 10)
        assert d7.matrix().shape == (8, 7)

    def test_digest_order_insensitive(self):
        d = small_dataset()
        shuffled = Dataset(list(reversed(d.examples)))
        assert d.digest() == shuffled.digest()


class TestSplitDataset:
    def test_exact_division(self):
        train, test = split_dataset(small_dataset(8), 0.75, seed=1)
        assert (len(train), len(test)) == (6, 2)

    def test_floor_rule_93(self):
        train, test = split_dataset(small_dataset(93), 0.75, seed=1)
        assert (len(train), len(test)) == (69, 24)

    def test_deterministic(self):
        a = split_dataset(small_dataset(20), 0.75, seed=5)
        b = split_dataset(small_dataset(20), 0.75, seed=5)
        assert [e.key for e in a[0].examples] == [e.key for e in b[0].examples]

    def test_partition_exact_and_disjoint(self):
        d = small_dataset(17)
        train, test = split_dataset(d, 0.6, seed=3)
        train_keys = {e.key for e in train.examples}
        test_keys = {e.key for e in test.examples}
        assert not train_keys & test_keys
        assert train_keys | test_keys == {e.key for e in d.examples}

    def test_too_small_rejected(self):
        with pytest.raises(ValueError, match="too small"):
            split_dataset(small_dataset(1), 0.75, seed=0)

    def test_bad_fraction_rejected(self):
        with pytest.raises(ValueError, match="fraction"):
            split_dataset(small_dataset(4), 1.5, seed=0)


class TestKfold:
    def test_equal_folds(self):
        pairs = kfold(small_dataset(8), 4, seed=0)
        assert [len(v) for _, v in pairs] == [2, 2, 2, 2]

    def test_remainder_spread(self):
        pairs = kfold(small_dataset(10), 4, seed=0)
        assert sorted((len(v) for _, v in pairs), reverse=True) == [3, 3, 2, 2]

    def test_partition_law(self):
        d = small_dataset(11)
        pairs = kfold(d, 4, seed=2)
        all_validation = [e.key for _, v in pairs for e in v.examples]
        assert len(all_validation) == len(set(all_validation)) == len(d)
        for fold_train, fold_validate in pairs:
            assert len(fold_train) + len(fold_validate) == len(d)
            assert not {e.key for e in fold_train.examples} & {
                e.key for e in fold_validate.examples
            }

    def test_k_too_large(self):
        with pytest.raises(ValueError, match="folds"):
            kfold(small_dataset(3), 4, seed=0)


class TestRandomForest:
    def test_constant_labels_constant_classifier(self):
        d = small_dataset()
        clf = train_random_forest(d, "C", FAST_RF, seed=0)
        for row in d.matrix():
            assert clf.predict_one(row) == "L"

    def test_planted_rule_accuracy(self):
        corpus = planted_rule_corpus(200, seed=3)
        train, test = split_dataset(corpus, 0.75, seed=3)
        clf = train_random_forest(train, "S", FAST_RF, seed=3)  # rule: li >= 3
        hits = sum(
            clf.predict_one(x) == label
            for x, label in zip(test.matrix(), test.labels_for("S"))
        )
        assert hits / len(test) >= 0.95

    def test_deterministic_predictions(self):
        corpus = planted_rule_corpus(80, seed=1)
        a = train_random_forest(corpus, "AC", FAST_RF, seed=9)
        b = train_random_forest(corpus, "AC", FAST_RF, seed=9)
        probe = corpus.matrix()
        assert [a.predict_one(x) for x in probe] == [b.predict_one(x) for x in probe]

    def test_json_round_trip(self):
        corpus = planted_rule_corpus(50, seed=2)
        clf = train_random_forest(corpus, "AV", FAST_RF, seed=4)
        again = RandomForestClassifier.from_json(json.loads(json.dumps(clf.to_json())))
        probe = corpus.matrix()
        assert [clf.predict_one(x) for x in probe] == [again.predict_one(x) for x in probe]


class TestNaiveBayes:
    def test_constant_labels(self):
        clf = train_naive_bayes(small_dataset(), "I")
        assert clf.predict_one(small_dataset().matrix()[0]) == "L"

    def test_separated_clusters(self):
        rng = np.random.default_rng(0)
        examples = []
        for i in range(200):
            high = i % 2 == 0
            base = 5.0 if high else 0.5
            features = FeatureVector(
                d_in=int(base + rng.integers(0, 2)),
                d_out=int(base + rng.integers(0, 2)),
                di=int(base),
                cc=0.5,
                nl=base,
                nv=1,
                li=1,
                s=int(base * 40) + 10,
                fx=int(base * 4) + 1,
                pt=int(base),
            )
            examples.append(
                LabeledExample(("p", "1", f"f{i}"), features, HIGH_VEC if high else LOW_VEC)
            )
        d = Dataset(examples)
        train, test = split_dataset(d, 0.75, seed=1)
        clf = train_naive_bayes(train, "C")
        hits = sum(
            clf.predict_one(x) == label
            for x, label in zip(test.matrix(), test.labels_for("C"))
        )
        assert hits / len(test) >= 0.95

    def test_zero_variance_feature_is_safe(self):
        d = small_dataset()  # nv is constant 1 across all examples
        clf = train_naive_bayes(d, "A")
        value = clf.predict_one(d.matrix()[0])
        assert value in METRIC_VALUES["A"]

    def test_json_round_trip(self):
        corpus = planted_rule_corpus(60, seed=5)
        clf = train_naive_bayes(corpus, "UI")
        again = GaussianNBClassifier.from_json(json.loads(json.dumps(clf.to_json())))
        probe = corpus.matrix()
        assert [clf.predict_one(x) for x in probe] == [again.predict_one(x) for x in probe]


class TestCrossValidate:
    def test_returns_a_fitted_classifier(self):
        corpus = planted_rule_corpus(40, seed=6)
        clf = cross_validate(corpus, "S", 2, "rf", FAST_RF, seed=1)
        assert clf.predict_one(corpus.matrix()[0]) in METRIC_VALUES["S"]

    def test_tie_breaks_to_first_fold(self):
        # constant labels: every fold validates at 1.0, fold 0 must win
        d = small_dataset(8)
        pairs = kfold(d, 4, seed=3)
        winner = cross_validate(d, "C", 4, "nb", None, seed=3)
        fold0 = train_naive_bayes(pairs[0][0], "C", None, seed=3)
        assert winner.to_json() == fold0.to_json()

    def test_winner_at_least_mean_accuracy(self):
        corpus = planted_rule_corpus(60, seed=8)
        accs = []
        for fold_train, fold_validate in kfold(corpus, 4, seed=8):
            clf = train_random_forest(fold_train, "AC", FAST_RF, seed=8)
            hits = sum(
                clf.predict_one(x) == label
                for x, label in zip(fold_validate.matrix(), fold_validate.labels_for("AC"))
            )
            accs.append(hits / len(fold_validate))
        winner = cross_validate(corpus, "AC", 4, "rf", FAST_RF, seed=8)
        winner_acc = max(accs)  # by construction of cross_validate
        assert winner_acc >= sum(accs) / len(accs)
        assert winner is not None


class _Constant:
    def __init__(self, value):
        self.value = value

    def predict_one(self, x):
        return self.value


class TestMajorityVote:
    def test_plain_majority(self):
        ensemble = [_Constant("H")] * 6 + [_Constant("L")] * 4
        assert majority_vote(ensemble, np.zeros(10), "C") == "H"

    def test_tie_breaks_severe(self):
        ensemble = [_Constant("H")] * 5 + [_Constant("L")] * 5
        assert majority_vote(ensemble, np.zeros(10), "C") == "H"
        ensemble = [_Constant("N")] * 5 + [_Constant("A")] * 5
        assert majority_vote(ensemble, np.zeros(10), "AV") == "N"
        # for AC the low-complexity attack is the more severe case
        ensemble = [_Constant("L")] * 5 + [_Constant("H")] * 5
        assert majority_vote(ensemble, np.zeros(10), "AC") == "L"

    def test_identical_members(self):
        ensemble = [_Constant("R")] * 10
        assert majority_vote(ensemble, np.zeros(10), "UI") == "R"

    def test_permutation_invariant(self):
        ensemble = [_Constant(v) for v in "H L H N H L N H H L".split()]
        forward = majority_vote(ensemble, np.zeros(10), "C")
        assert majority_vote(list(reversed(ensemble)), np.zeros(10), "C") == forward


class TestTrainModelSet:
    SEEDS = tuple(range(10))

    def test_shape(self):
        corpus = planted_rule_corpus(40, seed=4)
        m = train_model_set(corpus, "rf", 2, self.SEEDS, params=FAST_RF)
        assert set(m.per_metric) == set(METRIC_ORDER)
        assert all(len(v) == 10 for v in m.per_metric.values())

    def test_requires_ten_seeds(self):
        with pytest.raises(ValueError, match="10 seeds"):
            train_model_set(small_dataset(), "rf", 2, [1, 2, 3])

    def test_byte_identical_serialization(self):
        corpus = planted_rule_corpus(40, seed=4)
        a = train_model_set(corpus, "rf", 2, self.SEEDS, params=FAST_RF)
        b = train_model_set(corpus, "rf", 2, self.SEEDS, params=FAST_RF)
        assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)

    def test_jobs_do_not_change_outputs(self):
        corpus = planted_rule_corpus(40, seed=4)
        serial = train_model_set(corpus, "nb", 2, self.SEEDS)
        parallel = train_model_set(corpus, "nb", 2, self.SEEDS, jobs=4)
        assert json.dumps(serial.to_json(), sort_keys=True) == json.dumps(
            parallel.to_json(), sort_keys=True
        )

    def test_original7_mode_trains(self):
        corpus = planted_rule_corpus(40, seed=4, feature_mode="original7")
        m = train_model_set(corpus, "rf", 2, self.SEEDS, params=FAST_RF)
        assert m.feature_mode == "original7"

    def test_model_set_round_trip(self):
        corpus = planted_rule_corpus(40, seed=4)
        m = train_model_set(corpus, "nb", 2, self.SEEDS)
        again = TrainedModelSet.from_json(json.loads(json.dumps(m.to_json())))
        x = corpus.examples[0].features
        assert again.predict_metrics(x) == m.predict_metrics(x)


class TestPredictMetrics:
    SEEDS = tuple(range(10))

    def test_closed_output_domain(self):
        corpus = planted_rule_corpus(60, seed=9)
        m = train_model_set(corpus, "rf", 2, self.SEEDS, params=FAST_RF)
        rng = np.random.default_rng(0)
        for _ in range(25):
            x = rng.uniform(0, 500, size=10)
            vector = m.predict_metrics(x)
            assert isinstance(vector, Cvss3Vector)
            for metric in METRIC_ORDER:
                assert vector.get(metric) in METRIC_VALUES[metric]

    def test_planted_labels_recovered(self):
        corpus = planted_rule_corpus(200, seed=10)
        train, test = split_dataset(corpus, 0.75, seed=10)
        m = train_model_set(train, "rf", 4, self.SEEDS, params=FAST_RF)
        hits = 0
        for example in test.examples[:20]:
            if m.predict_metrics(example.features) == planted_labels(example.features):
                hits += 1
        assert hits >= 17  # full 8-metric vectors, near-perfect per metric

    def test_dimensionality_mismatch(self):
        corpus = planted_rule_corpus(30, seed=11)
        m = train_model_set(corpus, "nb", 2, self.SEEDS)
        with pytest.raises(ValueError, match="dimensionality"):
            m.predict_metrics(np.zeros(7))

    def test_feature_vector_projected_by_mode(self):
        corpus = planted_rule_corpus(30, seed=11, feature_mode="original7")
        m = train_model_set(corpus, "nb", 2, self.SEEDS)
        vector = m.predict_metrics(corpus.examples[0].features)
        assert isinstance(vector, Cvss3Vector)


class TestAccuracy:
    SEEDS = tuple(range(10))

    def test_perfect_predictor(self):
        corpus = planted_rule_corpus(120, seed=12)
        train, test = split_dataset(corpus, 0.75, seed=12)
        m = train_model_set(train, "rf", 4, self.SEEDS, params=FAST_RF)
        assert m.accuracy(test, "S") >= 0.95

    def test_constant_predictor_on_balanced_labels(self):
        examples = [make_example(i, labels=LOW_VEC if i < 2 else HIGH_VEC) for i in range(4)]
        test = Dataset(examples)
        ensemble = [_Constant("L")] * 10
        hits = sum(
            majority_vote(ensemble, x, "C") == label
            for x, label in zip(test.matrix(), test.labels_for("C"))
        )
        assert hits / len(test) == 0.5

    def test_empty_test_rejected(self):
        corpus = planted_rule_corpus(30, seed=13)
        m = train_model_set(corpus, "nb", 2, self.SEEDS)
        with pytest.raises(ValueError, match="empty"):
            m.accuracy(Dataset([]), "AV")

    def test_report_has_eight_rows(self):
        corpus = planted_rule_corpus(40, seed=14)
        train, test = split_dataset(corpus, 0.75, seed=14)
        m = train_model_set(train, "nb", 2, self.SEEDS)
        report = m.accuracy_report(test)
        assert set(report) == set(METRIC_ORDER)
        assert all(0.0 <= v <= 1.0 for v in report.values())


class TestExtendedFeatureGap:
    def test_pt_rule_needs_extended_mode(self):
        extended = planted_rule_corpus(200, seed=15)
        original = planted_rule_corpus(200, seed=15, feature_mode="original7")
        train_e, test_e = split_dataset(extended, 0.75, seed=15)
        train_o, test_o = split_dataset(original, 0.75, seed=15)
        seeds = tuple(range(10))
        ens_e = [cross_validate(train_e, EXTENDED_ONLY_METRIC, 4, "rf", FAST_RF, s) for s in seeds]
        ens_o = [cross_validate(train_o, EXTENDED_ONLY_METRIC, 4, "rf", FAST_RF, s) for s in seeds]

        def voted_accuracy(ensemble, test):
            hits = sum(
                majority_vote(ensemble, x, EXTENDED_ONLY_METRIC) == label
                for x, label in zip(test.matrix(), test.labels_for(EXTENDED_ONLY_METRIC))
            )
            return hits / len(test)

        acc_extended = voted_accuracy(ens_e, test_e)
        acc_original = voted_accuracy(ens_o, test_o)
        assert acc_extended >= acc_original + 0.10
