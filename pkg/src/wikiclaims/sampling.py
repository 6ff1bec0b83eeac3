"""Page parsing and seeded knowledge-source sampling."""

from __future__ import annotations

import random

from .markup import strip_markup, summary_region
from .metrics import tokenize
from .records import KnowledgeSource, ParsedPage, RawPage, SourceKind

MIN_WORD_TOKENS = 3
MAX_NON_LETTER_RATIO = 0.8
PAGE_SAMPLE_SIZE = 5


def is_eligible_sentence(sentence: str) -> bool:
    """Drop degenerate fragments: too few words or mostly non-letter noise."""
    stripped = sentence.strip()
    if not stripped:
        return False
    if len(tokenize(stripped, "").tokens) < MIN_WORD_TOKENS:
        return False
    non_letter = sum(1 for c in stripped if not c.isalpha())
    return non_letter / len(stripped) <= MAX_NON_LETTER_RATIO


def parse_page(page: RawPage, split_sentences) -> ParsedPage:
    """Strip markup and segment, keeping only eligible sentences.

    The summary is the region before the first section heading; its
    sentences are a prefix of the article's.
    """
    body_text = strip_markup(page.wikitext)
    summary_text = strip_markup(summary_region(page.wikitext))
    body = [s for s in split_sentences(body_text, page.language) if is_eligible_sentence(s)]
    summary = [s for s in split_sentences(summary_text, page.language) if is_eligible_sentence(s)]
    return ParsedPage(
        page_id=page.page_id,
        title=page.title,
        language=page.language,
        body_sentences=body,
        summary_sentences=summary,
    )


def _dedupe(sentences: list[str]) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for s in sentences:
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def sample_knowledge_sources(page: ParsedPage, seed: int) -> list[KnowledgeSource]:
    """Sample up to two knowledge sources per page.

    One group of up to five random body sentences, and one (first, random
    interior, last) triple from the summary. Deterministic for a given
    (page, seed): each group draws from its own string-seeded Mersenne
    Twister, so results are portable across platforms.
    """
    sources: list[KnowledgeSource] = []

    body = _dedupe(page.body_sentences)
    if body:
        rng = random.Random(f"{seed}:{page.page_id}:page_random")
        k = min(PAGE_SAMPLE_SIZE, len(body))
        picked = sorted(rng.sample(range(len(body)), k))
        sources.append(
            KnowledgeSource(
                source_id=f"{page.language}:{page.page_id}:{SourceKind.PAGE_RANDOM_5.value}",
                page_id=page.page_id,
                topic=page.title,
                language=page.language,
                kind=SourceKind.PAGE_RANDOM_5,
                sentences=[body[i] for i in picked],
                seed=seed,
            )
        )

    summary = _dedupe(page.summary_sentences)
    if summary:
        rng = random.Random(f"{seed}:{page.page_id}:summary_triple")
        triple = [summary[0]]
        if len(summary) > 2:
            triple.append(rng.choice(summary[1:-1]))
        if len(summary) > 1:
            triple.append(summary[-1])
        sources.append(
            KnowledgeSource(
                source_id=f"{page.language}:{page.page_id}:{SourceKind.SUMMARY_TRIPLE_3.value}",
                page_id=page.page_id,
                topic=page.title,
                language=page.language,
                kind=SourceKind.SUMMARY_TRIPLE_3,
                sentences=_dedupe(triple),
                seed=seed,
            )
        )

    return sources
