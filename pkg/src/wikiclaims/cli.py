"""Command-line entry points for the dataset generation pipeline."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import pipeline as pl
from .checkpoint import CheckpointStore, atomic_write_text
from .config import load_config
from .humaneval import (
    check_convergence,
    export_review_sheet,
    ingest_ratings,
    sample_for_review,
)
from .metrics import compute_stats, stats_report
from .records import ClaimRecord, KnowledgeSource


@click.group()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--resume", is_flag=True, help="Resume from an existing checkpoint.")
@click.pass_context
def main(ctx: click.Context, config_path: str, seed: int | None, resume: bool) -> None:
    """Generate, filter and export multilingual synthetic fact-checking data."""
    ctx.ensure_object(dict)
    config = load_config(config_path, seed_override=seed)
    ctx.obj["config"] = config
    ctx.obj["resume"] = resume
    ctx.obj["out_dir"] = Path(config.output_dir)
    ctx.obj["out_dir"].mkdir(parents=True, exist_ok=True)


def _load_records(path: Path) -> list[ClaimRecord]:
    if not path.exists():
        raise click.ClickException(f"{path} not found; run the preceding stage first")
    return [ClaimRecord.from_dict(d) for d in pl._read_jsonl(path)]


@main.command()
@click.pass_context
def sample(ctx: click.Context) -> None:
    """Sample knowledge sources from the configured dumps."""
    config = ctx.obj["config"]
    sources = pl.sample_stage(config, ctx.obj["out_dir"])
    click.echo(f"wrote {len(sources)} knowledge sources to {pl.SOURCES_FILE}")


@main.command()
@click.pass_context
def generate(ctx: click.Context) -> None:
    """Generate claims for sampled knowledge sources."""
    config = ctx.obj["config"]
    out_dir = ctx.obj["out_dir"]
    sources_path = out_dir / pl.SOURCES_FILE
    if not sources_path.exists():
        raise click.ClickException("no sources file; run `sample` first")
    sources = [KnowledgeSource.from_dict(d) for d in pl._read_jsonl(sources_path)]
    checkpoint = CheckpointStore(out_dir / pl.CHECKPOINT_FILE, config.fingerprint())
    if ctx.obj["resume"]:
        checkpoint.try_resume()
    try:
        records, calls, _ = pl.generation_stage(config, out_dir, sources, checkpoint)
    except pl.PipelineInterrupted as exc:
        raise click.ClickException(str(exc))
    click.echo(f"generated {len(records)} records ({calls} chat calls)")


@main.command(name="filter")
@click.pass_context
def filter_cmd(ctx: click.Context) -> None:
    """Apply the self-judgment filter and, when enabled, the NLI filter."""
    config = ctx.obj["config"]
    out_dir = ctx.obj["out_dir"]
    records = _load_records(out_dir / pl.GENERATED_FILE)
    pl.llm_filter_stage(records)
    if config.enable_nli:
        calls = pl.nli_filter_stage(config, out_dir, records)
        click.echo(f"NLI filter issued {calls} classifications")
    records.sort(key=lambda r: r.claim_id)
    pl._write_jsonl(out_dir / pl.FILTERED_FILE, (r.to_dict() for r in records))
    click.echo(f"wrote {len(records)} records to {pl.FILTERED_FILE}")


@main.command()
@click.pass_context
def stats(ctx: click.Context) -> None:
    """Compute per-language, per-class dataset statistics."""
    out_dir = ctx.obj["out_dir"]
    records = _load_records(out_dir / pl.FILTERED_FILE)
    rows = compute_stats([r for r in records if r.judgment is not None])
    report = stats_report(rows)
    atomic_write_text(out_dir / f"{pl.STATS_FILE}.tsv", report)
    atomic_write_text(
        out_dir / f"{pl.STATS_FILE}.json",
        json.dumps([row.to_dict() for row in rows], indent=2, sort_keys=True) + "\n",
    )
    click.echo(report, nl=False)


@main.command()
@click.pass_context
def export(ctx: click.Context) -> None:
    """Export the dataset variants and their manifests."""
    config = ctx.obj["config"]
    out_dir = ctx.obj["out_dir"]
    records = _load_records(out_dir / pl.FILTERED_FILE)
    manifest = pl.export_dataset(records, pl.VARIANT_NO_MNLI, out_dir)
    click.echo(f"{pl.VARIANT_NO_MNLI}: {manifest['total']} records")
    if config.enable_nli:
        manifest = pl.export_dataset(records, pl.VARIANT_MNLI, out_dir)
        click.echo(f"{pl.VARIANT_MNLI}: {manifest['total']} records")


@main.command()
@click.pass_context
def report(ctx: click.Context) -> None:
    """Print the per-variant class distribution table."""
    out_dir = ctx.obj["out_dir"]
    manifests = {}
    for variant in (pl.VARIANT_MNLI, pl.VARIANT_NO_MNLI):
        path = out_dir / f"manifest_{variant}.json"
        if path.exists():
            manifests[variant] = json.loads(path.read_text(encoding="utf-8"))
    if not manifests:
        raise click.ClickException("no manifests found; run `export` first")
    click.echo(pl.report_distribution(manifests), nl=False)


@main.command()
@click.pass_context
def run(ctx: click.Context) -> None:
    """Run the full pipeline end to end."""
    config = ctx.obj["config"]
    try:
        run_report = pl.run_pipeline(config, resume=ctx.obj["resume"])
    except pl.PipelineInterrupted as exc:
        raise click.ClickException(f"{exc} (rerun with --resume)")
    click.echo(json.dumps(run_report.to_dict(), indent=2, sort_keys=True))


@main.group()
def review() -> None:
    """Human-evaluation workflow: sample, rate, check convergence."""


@review.command(name="export")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--per-class", type=int, default=10, show_default=True)
@click.pass_context
def review_export(ctx: click.Context, out_path: str, per_class: int) -> None:
    """Sample claims per class and write a blank rating sheet."""
    config = ctx.obj["config"]
    records = _load_records(ctx.obj["out_dir"] / pl.FILTERED_FILE)
    sample = sample_for_review(records, per_class=per_class, seed=config.seed)
    atomic_write_text(Path(out_path), export_review_sheet(sample.items))
    note = ""
    if sample.short_classes:
        names = ", ".join(c.value for c in sample.short_classes)
        note = f" (short of {per_class} for: {names})"
    click.echo(f"wrote {len(sample.items)} review items to {out_path}{note}")


@review.command(name="ingest")
@click.argument("sheet", type=click.Path(exists=True))
def review_ingest(sheet: str) -> None:
    """Validate a filled rating sheet and report row-level problems."""
    result = ingest_ratings(Path(sheet).read_text(encoding="utf-8"))
    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)
    for error in result.errors:
        click.echo(f"error: {error}", err=True)
    click.echo(f"{len(result.rated_items)} rated items ingested")
    if result.errors:
        sys.exit(1)


@review.command(name="check")
@click.argument("sheet", type=click.Path(exists=True))
@click.pass_context
def review_check(ctx: click.Context, sheet: str) -> None:
    """Ingest ratings and report prompt-iteration convergence."""
    config = ctx.obj["config"]
    result = ingest_ratings(Path(sheet).read_text(encoding="utf-8"))
    report = check_convergence(result.rated_items, config.prompt_version)
    for aspect, mean in report.aspect_means.items():
        click.echo(f"{aspect}: {mean:.3f}")
    click.echo(f"converged: {report.converged} (prompt {report.prompt_version})")


if __name__ == "__main__":
    main()
