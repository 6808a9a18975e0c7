from pathlib import Path

import pytest

from vulnscore.callgraph import parse_analysis_report

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def autotrace_report():
    return parse_analysis_report((FIXTURES / "autotrace.json").read_text())


@pytest.fixture(scope="session")
def autotrace_graph(autotrace_report):
    return autotrace_report.graph


@pytest.fixture(scope="session")
def cvss3_oracle() -> dict[str, float]:
    oracle = {}
    with (FIXTURES / "cvss3_oracle.csv").open() as fh:
        next(fh)  # header
        for line in fh:
            vector, score = line.strip().rsplit(",", 1)
            oracle[vector] = float(score)
    return oracle


@pytest.fixture(scope="session")
def assessment_fixture(tmp_path_factory, autotrace_report):
    """A predicted assessment for the autotrace fixture, built once."""
    from vulnscore import pipeline

    workdir = tmp_path_factory.mktemp("assessment")
    _, csv_path, _ = pipeline.run_features(
        FIXTURES / "autotrace.json", out_csv=workdir / "features.csv"
    )
    pipeline.run_train(
        [csv_path],
        _ground_truth_file(workdir),
        algo="rf",
        kfolds=2,
        seed=7,
        model_out=workdir / "model.json",
        metrics_out=workdir / "metrics.json",
    )
    return pipeline.run_predict(
        workdir / "model.json",
        csv_path,
        _ground_truth_file(workdir),
        out=workdir / "assessment.json",
    )


def _ground_truth_file(workdir: Path) -> Path:
    from vulnscore import nvd, pipeline

    out = workdir / "gt.json"
    if not out.exists():
        config = pipeline.load_ingest_config(FIXTURES / "config.ini")
        entries, _ = pipeline.run_ingest(
            [FIXTURES / "nvd_feed.json"], FIXTURES / "manual_scores.json", config
        )
        pipeline.write_json(out, nvd.ground_truth_to_json(entries))
    return out
