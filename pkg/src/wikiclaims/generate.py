"""Claim generation: one chat call per class per knowledge source."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .chat import ChatClient, ChatEndpointError, ChatUnavailableError
from .metrics import tokenize
from .parsing import ParseFailure, parse_generation
from .prompts import build_prompt, language_name
from .records import CLASS_ORDER, ClaimClass, ClaimRecord, KnowledgeSource, Status

OVER_LENGTH_WORDS = 30


class GenerationInterrupted(Exception):
    """The chat endpoint became unavailable; partial results are attached."""

    def __init__(self, source_id: str, partial: list[ClaimRecord]):
        super().__init__(f"generation interrupted at source {source_id}")
        self.source_id = source_id
        self.partial = partial


@dataclass
class GenerationOptions:
    prompt_version: str = "v1"
    drop_over_length: bool = False


def _claim_id(source: KnowledgeSource, claim_class: ClaimClass) -> str:
    return f"{source.source_id}:{claim_class.value}"


def _base_record(source: KnowledgeSource, claim_class: ClaimClass) -> ClaimRecord:
    return ClaimRecord(
        claim_id=_claim_id(source, claim_class),
        source_id=source.source_id,
        topic=source.topic,
        language=source.language,
        target_class=claim_class,
        source_text=source.joined_text,
        judgment=None,
    )


def generate_claims_for_source(
    source: KnowledgeSource,
    client: ChatClient,
    options: Optional[GenerationOptions] = None,
) -> list[ClaimRecord]:
    """Issue three generation calls (one per class) and build records.

    Parse failures and non-retryable endpoint errors become Rejected records;
    an unavailable endpoint raises GenerationInterrupted with the records
    completed so far, so the caller can checkpoint and resume.
    """
    options = options or GenerationOptions()
    records: list[ClaimRecord] = []
    for claim_class in CLASS_ORDER:
        record = _base_record(source, claim_class)
        prompt = build_prompt(
            claim_class,
            language_name(source.language),
            source.topic,
            source.joined_text,
            version=options.prompt_version,
        )
        try:
            result = client.request_generation(prompt, context={"claim_id": record.claim_id})
        except ChatUnavailableError:
            raise GenerationInterrupted(source.source_id, records) from None
        except ChatEndpointError:
            record.status = Status.REJECTED
            record.rejected_reason = "endpoint_error"
            record.rejected_stage = "generation"
            records.append(record)
            continue
        try:
            judgment = parse_generation(result.content)
        except ParseFailure:
            record.status = Status.REJECTED
            record.rejected_reason = "unparseable"
            record.rejected_stage = "generation"
            records.append(record)
            continue
        record.judgment = judgment
        record.word_count = len(tokenize(judgment.claim, source.language).tokens)
        record.over_length = record.word_count >= OVER_LENGTH_WORDS
        if record.over_length and options.drop_over_length:
            record.status = Status.REJECTED
            record.rejected_reason = "over_length"
            record.rejected_stage = "generation"
        else:
            record.status = Status.GENERATED
        records.append(record)
    return records
