"""Human review round-trip: sample claims, export/ingest rating sheets, convergence."""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .records import CLASS_ORDER, ClaimClass, ClaimRecord

REVIEW_SHEET_COLUMNS = (
    "claim_id", "language", "target_class", "source_text", "claim",
    "overall_quality", "grammaticality", "semantic_relation", "label_correct",
    "rater_id",
)

ASPECTS = ("overall_quality", "grammaticality", "semantic_relation")
DEFAULT_PER_CLASS = 10
DEFAULT_RATER_COUNT = 2
CONVERGENCE_BAR = 4.0  # strict: every aspect mean must exceed this


@dataclass
class Rating:
    overall_quality: int
    grammaticality: int
    semantic_relation: int
    label_correct: bool

    def __post_init__(self) -> None:
        for aspect in ASPECTS:
            value = getattr(self, aspect)
            if not isinstance(value, int) or not 1 <= value <= 5:
                raise ValueError(f"{aspect} must be an integer in [1, 5], got {value!r}")


@dataclass
class ReviewItem:
    claim_id: str
    language: str
    target_class: ClaimClass
    source_text: str
    claim: str
    ratings: dict[str, Rating] = field(default_factory=dict)


@dataclass
class ReviewSample:
    items: list[ReviewItem]
    # Classes where fewer than per_class records were available.
    short_classes: list[ClaimClass] = field(default_factory=list)


@dataclass
class ConvergenceReport:
    aspect_means: dict[str, float]
    converged: bool
    prompt_version: str


def sample_for_review(
    records: Iterable[ClaimRecord],
    per_class: int = DEFAULT_PER_CLASS,
    seed: int = 0,
) -> ReviewSample:
    """Uniform per-class sample without replacement, deterministic under seed."""
    pool: dict[ClaimClass, list[ClaimRecord]] = {c: [] for c in CLASS_ORDER}
    total = 0
    for record in records:
        if record.judgment is not None:
            pool[record.target_class].append(record)
            total += 1
    if total == 0:
        raise ValueError("no records with judgments to sample from")

    items: list[ReviewItem] = []
    short: list[ClaimClass] = []
    for claim_class in CLASS_ORDER:
        members = sorted(pool[claim_class], key=lambda r: r.claim_id)
        if len(members) <= per_class:
            chosen = members
            if len(members) < per_class:
                short.append(claim_class)
        else:
            rng = random.Random(f"{seed}:review:{claim_class.value}")
            chosen = [members[i] for i in sorted(rng.sample(range(len(members)), per_class))]
        for record in chosen:
            items.append(
                ReviewItem(
                    claim_id=record.claim_id,
                    language=record.language,
                    target_class=record.target_class,
                    source_text=record.source_text,
                    claim=record.claim,
                )
            )
    return ReviewSample(items=items, short_classes=short)


def export_review_sheet(items: Iterable[ReviewItem]) -> str:
    """UTF-8 TSV with a fixed header; rating columns left blank for raters.

    The model's self-assessment scores are deliberately not included, so
    raters are not anchored by them.
    """
    out = io.StringIO()
    writer = csv.writer(out, delimiter="\t", lineterminator="\n")
    writer.writerow(REVIEW_SHEET_COLUMNS)
    for item in items:
        writer.writerow([
            item.claim_id, item.language, item.target_class.value,
            item.source_text, item.claim, "", "", "", "", "",
        ])
    return out.getvalue()


@dataclass
class IngestResult:
    items: list[ReviewItem]
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def rated_items(self) -> list[ReviewItem]:
        return [item for item in self.items if item.ratings]


def ingest_ratings(tsv_text: str, items: Optional[Iterable[ReviewItem]] = None) -> IngestResult:
    """Read back a filled sheet, matching rows to items by claim_id.

    Rows with out-of-range or non-integer ratings are rejected individually
    with their line number; rows with all rating cells empty produce a
    missing-rating warning. A rater may rate a claim at most once.
    """
    by_id: dict[str, ReviewItem] = {}
    if items is not None:
        by_id = {item.claim_id: item for item in items}

    reader = csv.DictReader(io.StringIO(tsv_text), delimiter="\t")
    if reader.fieldnames is None or tuple(reader.fieldnames) != REVIEW_SHEET_COLUMNS:
        raise ValueError(
            f"sheet header must be exactly {list(REVIEW_SHEET_COLUMNS)}, got {reader.fieldnames}"
        )

    result = IngestResult(items=list(by_id.values()))
    for line_no, row in enumerate(reader, start=2):
        claim_id = (row.get("claim_id") or "").strip()
        if not claim_id:
            result.errors.append(f"line {line_no}: missing claim_id")
            continue
        item = by_id.get(claim_id)
        if item is None:
            item = ReviewItem(
                claim_id=claim_id,
                language=row.get("language") or "",
                target_class=ClaimClass.from_str(row.get("target_class") or "not-info"),
                source_text=row.get("source_text") or "",
                claim=row.get("claim") or "",
            )
            by_id[claim_id] = item
            result.items.append(item)

        cells = {aspect: (row.get(aspect) or "").strip() for aspect in ASPECTS}
        label_cell = (row.get("label_correct") or "").strip()
        rater_id = (row.get("rater_id") or "").strip()
        if not any(cells.values()) and not label_cell:
            result.warnings.append(f"line {line_no}: no ratings filled for {claim_id}")
            continue
        try:
            scores = {aspect: int(cells[aspect]) for aspect in ASPECTS}
            if label_cell not in ("0", "1"):
                raise ValueError(f"label_correct must be 0 or 1, got {label_cell!r}")
            rating = Rating(label_correct=label_cell == "1", **scores)
        except ValueError as exc:
            result.errors.append(f"line {line_no}: {exc}")
            continue
        rater = rater_id or "rater_1"
        if rater in item.ratings:
            result.errors.append(f"line {line_no}: duplicate rating for {claim_id} by {rater}")
            continue
        item.ratings[rater] = rating
    return result


def check_convergence(items: Iterable[ReviewItem], prompt_version: str) -> ConvergenceReport:
    """Aspect means across all raters and items; converged iff every mean > 4."""
    totals = {aspect: 0.0 for aspect in ASPECTS}
    count = 0
    for item in items:
        for rating in item.ratings.values():
            count += 1
            for aspect in ASPECTS:
                totals[aspect] += getattr(rating, aspect)
    if count == 0:
        raise ValueError("need at least one rated item")
    means = {aspect: totals[aspect] / count for aspect in ASPECTS}
    converged = all(mean > CONVERGENCE_BAR for mean in means.values())
    return ConvergenceReport(aspect_means=means, converged=converged, prompt_version=prompt_version)
