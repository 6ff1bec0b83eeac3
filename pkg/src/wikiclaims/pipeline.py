"""End-to-end orchestration: sample, generate, filter, evaluate, export."""

from __future__ import annotations

import json
import random
import threading
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Iterable, Optional

import httpx

from .chat import ChatClient
from .checkpoint import CheckpointStore, atomic_write_text
from .config import PipelineConfig
from .dump import stream_pages
from .filtering import NliClient, llm_filter, nli_filter
from .generate import GenerationInterrupted, GenerationOptions, generate_claims_for_source
from .metrics import compute_stats, stats_report
from .records import (
    CLASS_ORDER,
    ClaimRecord,
    KnowledgeSource,
    NliVerdict,
    Status,
)
from .sampling import parse_page, sample_knowledge_sources
from .sentences import split_sentences

VARIANT_NO_MNLI = "no_mnli_filtering"
VARIANT_MNLI = "mnli_filtering"
SCHEMA_VERSION = 1

SOURCES_FILE = "sources.jsonl"
GENERATED_FILE = "generated.jsonl"
FILTERED_FILE = "filtered.jsonl"
NLI_CACHE_FILE = "nli_verdicts.jsonl"
CHECKPOINT_FILE = "checkpoint.json"
REPORT_FILE = "run_report.json"
STATS_FILE = "stats"


class PipelineInterrupted(Exception):
    """A model endpoint became unavailable; state was checkpointed."""


class SubsetViolation(Exception):
    """mnli_filtering counts exceeded no_mnli_filtering counts (pipeline bug)."""


@dataclass
class RunReport:
    stage_counts: dict = dataclass_field(default_factory=dict)
    drop_reasons: dict = dataclass_field(default_factory=dict)
    chat_calls: int = 0
    chat_retries: int = 0
    nli_calls: int = 0
    duration_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "stage_counts": self.stage_counts,
            "drop_reasons": self.drop_reasons,
            "chat_calls": self.chat_calls,
            "chat_retries": self.chat_retries,
            "nli_calls": self.nli_calls,
            "duration_seconds": self.duration_seconds,
        }


def _write_jsonl(path: Path, dicts: Iterable[dict]) -> None:
    text = "".join(json.dumps(d, ensure_ascii=False, sort_keys=True) + "\n" for d in dicts)
    atomic_write_text(path, text)


def _read_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        return []
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line]


def sample_stage(config: PipelineConfig, out_dir: Path) -> list[KnowledgeSource]:
    """Stream dumps, reservoir-sample entries per language, emit knowledge sources."""
    sources: list[KnowledgeSource] = []
    for language in config.languages:
        rng = random.Random(f"{config.seed}:entries:{language}")
        reservoir: list = []
        seen = 0
        for page in stream_pages(config.dumps[language], language):
            seen += 1
            if len(reservoir) < config.entry_sample_size:
                reservoir.append(page)
            else:
                j = rng.randrange(seen)
                if j < config.entry_sample_size:
                    reservoir[j] = page
        for page in reservoir:
            parsed = parse_page(page, split_sentences)
            sources.extend(sample_knowledge_sources(parsed, config.seed))
    sources.sort(key=lambda s: s.source_id)
    _write_jsonl(out_dir / SOURCES_FILE, (s.to_dict() for s in sources))
    return sources


def generation_stage(
    config: PipelineConfig,
    out_dir: Path,
    sources: list[KnowledgeSource],
    checkpoint: CheckpointStore,
    chat_transport: Optional[httpx.BaseTransport] = None,
) -> tuple[list[ClaimRecord], int, int]:
    """Generate claims with bounded concurrency, checkpointing per source.

    Completed sources are never re-sent on resume; their records are read
    back from the work file.
    """
    done = checkpoint.completed("generated")
    existing = [ClaimRecord.from_dict(d) for d in _read_jsonl(out_dir / GENERATED_FILE)]
    existing = [r for r in existing if r.source_id in done]
    pending = [s for s in sources if s.source_id not in done]

    options = GenerationOptions(
        prompt_version=config.prompt_version,
        drop_over_length=config.drop_over_length,
    )
    records: list[ClaimRecord] = list(existing)
    lock = threading.Lock()
    calls = 0
    interrupted: list[GenerationInterrupted] = []

    def flush() -> None:
        records.sort(key=lambda r: r.claim_id)
        _write_jsonl(out_dir / GENERATED_FILE, (r.to_dict() for r in records))

    with ChatClient(config.chat, transport=chat_transport) as client:
        def work(source: KnowledgeSource) -> None:
            nonlocal calls
            if interrupted:
                return
            try:
                batch = generate_claims_for_source(source, client, options)
            except GenerationInterrupted as exc:
                with lock:
                    interrupted.append(exc)
                return
            with lock:
                calls += len(batch)
                records.extend(batch)
                flush()
                checkpoint.mark_completed("generated", source.source_id)

        with ThreadPoolExecutor(max_workers=config.chat.concurrency) as pool:
            list(pool.map(work, pending))

    if interrupted:
        raise PipelineInterrupted(
            f"chat endpoint unavailable; {len(done)} of {len(sources)} sources completed"
        ) from interrupted[0]

    records.sort(key=lambda r: r.claim_id)
    return records, calls, len(pending) * len(CLASS_ORDER)


def llm_filter_stage(records: list[ClaimRecord]) -> list[ClaimRecord]:
    for record in records:
        if record.status == Status.GENERATED:
            llm_filter(record)
    return records


def nli_filter_stage(
    config: PipelineConfig,
    out_dir: Path,
    records: list[ClaimRecord],
    nli_transport: Optional[httpx.BaseTransport] = None,
) -> int:
    """Classify LLM-passed claims against the NLI service and filter.

    Verdicts are cached per claim_id, so an interrupted run never re-issues
    completed NLI calls.
    """
    cache: dict[str, NliVerdict] = {}
    cache_path = out_dir / NLI_CACHE_FILE
    for entry in _read_jsonl(cache_path):
        cache[entry["claim_id"]] = NliVerdict.from_dict(entry["verdict"])

    todo = [r for r in records if r.status == Status.PASSED_LLM_FILTER and r.claim_id not in cache]
    calls = 0
    if todo:
        with NliClient(config.nli, transport=nli_transport) as client:
            batch_size = config.nli.batch_size
            for start in range(0, len(todo), batch_size):
                chunk = todo[start : start + batch_size]
                pairs = [(r.source_text, r.claim) for r in chunk]
                verdicts = client.classify_batch(pairs)
                calls += len(chunk)
                with cache_path.open("a", encoding="utf-8") as fh:
                    for record, verdict in zip(chunk, verdicts):
                        cache[record.claim_id] = verdict
                        fh.write(
                            json.dumps(
                                {"claim_id": record.claim_id, "verdict": verdict.to_dict()},
                                ensure_ascii=False,
                                sort_keys=True,
                            )
                            + "\n"
                        )

    for record in records:
        if record.status == Status.PASSED_LLM_FILTER:
            nli_filter(record, cache[record.claim_id])
    return calls


def _variant_members(records: Iterable[ClaimRecord], variant: str) -> list[ClaimRecord]:
    members = []
    for record in records:
        passed_llm = record.status in (Status.PASSED_LLM_FILTER, Status.PASSED_NLI_FILTER) or (
            record.status == Status.REJECTED and record.rejected_stage == "nli_filter"
        )
        if variant == VARIANT_NO_MNLI:
            if passed_llm:
                members.append(record)
        elif variant == VARIANT_MNLI:
            if record.status == Status.PASSED_NLI_FILTER:
                members.append(record)
        else:
            raise ValueError(f"unknown variant {variant!r}")
    return sorted(members, key=lambda r: r.claim_id)


def export_dataset(records: Iterable[ClaimRecord], variant: str, out_dir: Path) -> dict:
    """Write one dataset variant and its manifest; returns the manifest."""
    members = _variant_members(records, variant)
    _write_jsonl(out_dir / f"dataset_{variant}.jsonl", (r.to_dict() for r in members))

    counts: dict[str, dict[str, int]] = {}
    for record in members:
        by_class = counts.setdefault(record.language, {c.value: 0 for c in CLASS_ORDER})
        by_class[record.target_class.value] += 1
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "variant": variant,
        "counts": counts,
        "total": len(members),
    }
    atomic_write_text(
        out_dir / f"manifest_{variant}.json",
        json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
    )
    return manifest


def report_distribution(manifests: dict[str, dict]) -> str:
    """Per language, per class counts for each variant; enforces the subset rule."""
    mnli = manifests.get(VARIANT_MNLI, {}).get("counts", {})
    no_mnli = manifests.get(VARIANT_NO_MNLI, {}).get("counts", {})
    languages = sorted(set(mnli) | set(no_mnli))
    lines = ["language\tclass\tmnli_filtering\tno_mnli_filtering"]
    for language in languages:
        for claim_class in CLASS_ORDER:
            a = mnli.get(language, {}).get(claim_class.value, 0)
            b = no_mnli.get(language, {}).get(claim_class.value, 0)
            if a > b:
                raise SubsetViolation(
                    f"{language}/{claim_class.value}: mnli count {a} exceeds no-mnli count {b}"
                )
            lines.append(f"{language}\t{claim_class.value}\t{a}\t{b}")
    return "\n".join(lines) + "\n"


def run_pipeline(
    config: PipelineConfig,
    resume: bool = False,
    chat_transport: Optional[httpx.BaseTransport] = None,
    nli_transport: Optional[httpx.BaseTransport] = None,
) -> RunReport:
    """Full run: sample, generate, filter, stats, export both variants."""
    started = time.monotonic()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    checkpoint = CheckpointStore(out_dir / CHECKPOINT_FILE, config.fingerprint())
    resumed = checkpoint.try_resume() if resume else False
    if not resumed:
        checkpoint.save()

    if config.enable_nli:
        with NliClient(config.nli, transport=nli_transport) as client:
            health = client.health()
            if health.get("status") != "ok":
                raise RuntimeError(f"NLI service unhealthy: {health}")

    sources_path = out_dir / SOURCES_FILE
    if resumed and sources_path.exists():
        sources = [KnowledgeSource.from_dict(d) for d in _read_jsonl(sources_path)]
    else:
        sources = sample_stage(config, out_dir)
        checkpoint.set_stage("sampled")

    report = RunReport()
    records, chat_calls, _ = generation_stage(
        config, out_dir, sources, checkpoint, chat_transport
    )
    checkpoint.set_stage("generated")
    report.chat_calls = chat_calls

    llm_filter_stage(records)
    checkpoint.set_stage("llm_filtered")

    if config.enable_nli:
        report.nli_calls = nli_filter_stage(config, out_dir, records, nli_transport)
        checkpoint.set_stage("nli_filtered")

    records.sort(key=lambda r: r.claim_id)
    _write_jsonl(out_dir / FILTERED_FILE, (r.to_dict() for r in records))

    rated = [r for r in records if r.judgment is not None]
    rows = compute_stats(rated)
    atomic_write_text(out_dir / f"{STATS_FILE}.tsv", stats_report(rows))
    atomic_write_text(
        out_dir / f"{STATS_FILE}.json",
        json.dumps([row.to_dict() for row in rows], indent=2, sort_keys=True) + "\n",
    )

    manifests = {VARIANT_NO_MNLI: export_dataset(records, VARIANT_NO_MNLI, out_dir)}
    if config.enable_nli:
        manifests[VARIANT_MNLI] = export_dataset(records, VARIANT_MNLI, out_dir)
        report_distribution(manifests)  # raises on subset violations
    checkpoint.set_stage("exported")

    report.stage_counts = _stage_counts(records)
    report.drop_reasons = dict(Counter(
        f"{r.rejected_stage}:{r.rejected_reason}" for r in records if r.status == Status.REJECTED
    ))
    report.duration_seconds = time.monotonic() - started
    atomic_write_text(
        out_dir / REPORT_FILE,
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
    )
    _check_conservation(records)
    return report


def _stage_counts(records: list[ClaimRecord]) -> dict:
    counts = Counter(r.status.value for r in records)
    return {
        "sources": len({r.source_id for r in records}),
        "generated": len(records),
        "passed_llm_filter": counts[Status.PASSED_LLM_FILTER.value]
        + counts[Status.PASSED_NLI_FILTER.value]
        + sum(1 for r in records if r.rejected_stage == "nli_filter"),
        "passed_nli_filter": counts[Status.PASSED_NLI_FILTER.value],
        "rejected": counts[Status.REJECTED.value],
    }


def _check_conservation(records: list[ClaimRecord]) -> None:
    """Every record is kept, dropped by a filter, or rejected at generation."""
    for record in records:
        ok = record.status in (Status.PASSED_LLM_FILTER, Status.PASSED_NLI_FILTER) or (
            record.status == Status.REJECTED
            and record.rejected_stage in ("generation", "llm_filter", "nli_filter")
        ) or record.status == Status.GENERATED
        if not ok:
            raise AssertionError(f"record {record.claim_id} in inconsistent state")
