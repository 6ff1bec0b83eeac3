import json
from pathlib import Path

import pytest

import wikiclaims.pipeline as pl
from wikiclaims.records import CLASS_ORDER, ClaimRecord, Status

from .conftest import make_pipeline_config
from .mocks import FlakyChatTransport, MockChatTransport, MockNliTransport

COMPARED_FILES = (
    pl.SOURCES_FILE,
    pl.GENERATED_FILE,
    pl.FILTERED_FILE,
    f"dataset_{pl.VARIANT_NO_MNLI}.jsonl",
    f"dataset_{pl.VARIANT_MNLI}.jsonl",
    f"manifest_{pl.VARIANT_NO_MNLI}.json",
    f"manifest_{pl.VARIANT_MNLI}.json",
    f"{pl.STATS_FILE}.tsv",
    f"{pl.STATS_FILE}.json",
)


def run(dumps, out_dir, seed=42, enable_nli=True, resume=False, chat_transport=None):
    config = make_pipeline_config(dumps, out_dir, seed=seed, enable_nli=enable_nli)
    return config, pl.run_pipeline(
        config,
        resume=resume,
        chat_transport=chat_transport or MockChatTransport(),
        nli_transport=MockNliTransport(),
    )


def read_records(path: Path) -> list[ClaimRecord]:
    return [ClaimRecord.from_dict(d) for d in pl._read_jsonl(path)]


def snapshot(out_dir: Path, names=COMPARED_FILES) -> dict[str, bytes]:
    return {name: (out_dir / name).read_bytes() for name in names}


def test_full_run_produces_all_outputs(fixture_dumps, tmp_path):
    out_dir = tmp_path / "out"
    _, report = run(fixture_dumps, out_dir)
    for name in COMPARED_FILES + (pl.CHECKPOINT_FILE, pl.REPORT_FILE):
        assert (out_dir / name).exists(), name

    records = read_records(out_dir / pl.FILTERED_FILE)
    assert records, "pipeline produced no records"
    # three claims per knowledge source, one per class
    sources = pl._read_jsonl(out_dir / pl.SOURCES_FILE)
    assert len(records) == 3 * len(sources)
    assert report.stage_counts["generated"] == len(records)
    assert report.chat_calls == len(records)

    # records survive in every class of the final dataset
    mnli = read_records(out_dir / f"dataset_{pl.VARIANT_MNLI}.jsonl")
    classes = {r.target_class for r in mnli}
    assert classes == set(CLASS_ORDER)
    assert all(r.status == Status.PASSED_NLI_FILTER for r in mnli)


def test_two_runs_same_seed_are_byte_identical(fixture_dumps, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    run(fixture_dumps, out_a)
    run(fixture_dumps, out_b)
    assert snapshot(out_a) == snapshot(out_b)


def test_different_seed_changes_the_sample(fixture_dumps, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    run(fixture_dumps, out_a, seed=1)
    run(fixture_dumps, out_b, seed=2)
    assert (out_a / pl.SOURCES_FILE).read_bytes() != (out_b / pl.SOURCES_FILE).read_bytes()


def test_mnli_variant_is_subset_of_no_mnli(fixture_dumps, tmp_path):
    out_dir = tmp_path / "out"
    run(fixture_dumps, out_dir)
    no_mnli = {r.claim_id for r in read_records(out_dir / f"dataset_{pl.VARIANT_NO_MNLI}.jsonl")}
    mnli = {r.claim_id for r in read_records(out_dir / f"dataset_{pl.VARIANT_MNLI}.jsonl")}
    assert mnli <= no_mnli
    assert len(mnli) < len(no_mnli)  # the mock heuristics disagree sometimes

    for variant, expected in ((pl.VARIANT_NO_MNLI, no_mnli), (pl.VARIANT_MNLI, mnli)):
        manifest = json.loads((out_dir / f"manifest_{variant}.json").read_text())
        assert manifest["total"] == len(expected)
        assert manifest["variant"] == variant
        counted = sum(sum(v.values()) for v in manifest["counts"].values())
        assert counted == manifest["total"]


def test_nli_disabled_exports_single_variant(fixture_dumps, tmp_path):
    out_dir = tmp_path / "out"
    _, report = run(fixture_dumps, out_dir, enable_nli=False)
    assert (out_dir / f"dataset_{pl.VARIANT_NO_MNLI}.jsonl").exists()
    assert not (out_dir / f"dataset_{pl.VARIANT_MNLI}.jsonl").exists()
    assert report.nli_calls == 0
    records = read_records(out_dir / pl.FILTERED_FILE)
    assert all(r.nli_verdict is None for r in records)
    assert all(r.status != Status.PASSED_NLI_FILTER for r in records)


def test_interrupted_run_resumes_to_identical_output(fixture_dumps, tmp_path):
    out_full, out_resumed = tmp_path / "full", tmp_path / "resumed"
    run(fixture_dumps, out_full)

    flaky = FlakyChatTransport(budget=24)
    with pytest.raises(pl.PipelineInterrupted):
        run(fixture_dumps, out_resumed, chat_transport=flaky)

    checkpoint = json.loads((out_resumed / pl.CHECKPOINT_FILE).read_text())
    done_before = set(checkpoint["completed"]["generated"])
    assert done_before, "no sources completed before the simulated outage"

    steady = MockChatTransport()
    run(fixture_dumps, out_resumed, resume=True, chat_transport=steady)
    assert snapshot(out_full) == snapshot(out_resumed)
    # completed sources were not re-sent after the restart
    assert steady.calls < (out_full / pl.GENERATED_FILE).read_text().count("\n")


def test_resume_with_changed_seed_refuses(fixture_dumps, tmp_path):
    out_dir = tmp_path / "out"
    flaky = FlakyChatTransport(budget=12)
    with pytest.raises(pl.PipelineInterrupted):
        run(fixture_dumps, out_dir, seed=42, chat_transport=flaky)
    from wikiclaims.checkpoint import CheckpointMismatch

    with pytest.raises(CheckpointMismatch):
        run(fixture_dumps, out_dir, seed=43, resume=True)


def test_nli_verdicts_cached_across_resume(fixture_dumps, tmp_path):
    out_dir = tmp_path / "out"
    run(fixture_dumps, out_dir)
    first_cache = (out_dir / pl.NLI_CACHE_FILE).read_text()

    nli = MockNliTransport()
    config = make_pipeline_config(fixture_dumps, out_dir)
    pl.run_pipeline(
        config, resume=True, chat_transport=MockChatTransport(), nli_transport=nli
    )
    assert nli.calls == 0  # everything served from the verdict cache
    assert (out_dir / pl.NLI_CACHE_FILE).read_text() == first_cache


def test_report_distribution_enforces_subset_rule():
    manifests = {
        pl.VARIANT_MNLI: {"counts": {"en": {"supports": 5, "refutes": 1, "not-info": 0}}},
        pl.VARIANT_NO_MNLI: {"counts": {"en": {"supports": 4, "refutes": 2, "not-info": 0}}},
    }
    with pytest.raises(pl.SubsetViolation):
        pl.report_distribution(manifests)

    manifests[pl.VARIANT_MNLI]["counts"]["en"]["supports"] = 4
    table = pl.report_distribution(manifests)
    assert table.splitlines()[0] == "language\tclass\tmnli_filtering\tno_mnli_filtering"
    assert "en\tsupports\t4\t4" in table


def test_every_record_accounted_for(fixture_dumps, tmp_path):
    out_dir = tmp_path / "out"
    _, report = run(fixture_dumps, out_dir)
    records = read_records(out_dir / pl.FILTERED_FILE)

    kept = sum(1 for r in records if r.status == Status.PASSED_NLI_FILTER)
    llm_only = sum(
        1 for r in records
        if r.status == Status.REJECTED and r.rejected_stage == "nli_filter"
    )
    rejected_early = sum(
        1 for r in records
        if r.status == Status.REJECTED and r.rejected_stage in ("generation", "llm_filter")
    )
    assert kept + llm_only + rejected_early == len(records)
    assert report.stage_counts["passed_nli_filter"] == kept
    assert report.stage_counts["passed_llm_filter"] == kept + llm_only
    assert sum(report.drop_reasons.values()) == llm_only + rejected_early


def test_stats_files_cover_all_language_class_rows(fixture_dumps, tmp_path):
    out_dir = tmp_path / "out"
    run(fixture_dumps, out_dir)
    rows = json.loads((out_dir / f"{pl.STATS_FILE}.json").read_text())
    keys = {(r["language"], r["class"]) for r in rows}
    assert keys == {
        (lang, c.value) for lang in ("de", "en", "es") for c in CLASS_ORDER
    }
    tsv = (out_dir / f"{pl.STATS_FILE}.tsv").read_text()
    assert len(tsv.splitlines()) == 1 + len(rows)
