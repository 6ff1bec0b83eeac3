"""Shared fixtures: synthetic dumps, pipeline configs, record builders."""

from __future__ import annotations

import random
from pathlib import Path
from xml.sax.saxutils import escape

import pytest

from wikiclaims.chat import ChatConfig
from wikiclaims.config import PipelineConfig
from wikiclaims.filtering import NliConfig
from wikiclaims.records import ClaimClass, ClaimRecord, GenerationJudgment, Status

MEDIAWIKI_NS = "http://www.mediawiki.org/xml/export-0.10/"


def page_xml(page_id, title, wikitext, ns=0, redirect=None) -> str:
    parts = [
        "  <page>",
        f"    <title>{escape(title)}</title>",
        f"    <ns>{ns}</ns>",
        f"    <id>{page_id}</id>",
    ]
    if redirect:
        parts.append(f'    <redirect title="{escape(redirect)}" />')
    parts += [
        "    <revision>",
        f"      <id>{page_id * 10}</id>",
        f'      <text xml:space="preserve">{escape(wikitext)}</text>',
        "    </revision>",
        "  </page>",
    ]
    return "\n".join(parts)


def dump_xml(pages: list[str]) -> str:
    body = "\n".join(pages)
    return f'<mediawiki xmlns="{MEDIAWIKI_NS}" xml:lang="en">\n{body}\n</mediawiki>\n'


# Topic/noun pools per language for generated fixture articles.
_WORDS = {
    "en": ("river", "castle", "treaty", "mountain", "poet", "harbor", "bridge",
           "library", "festival", "region", "valley", "museum"),
    "de": ("Fluss", "Burg", "Vertrag", "Gebirge", "Dichter", "Hafen", "Brücke",
           "Bibliothek", "Fest", "Region", "Tal", "Museum"),
    "es": ("río", "castillo", "tratado", "montaña", "poeta", "puerto", "puente",
           "biblioteca", "festival", "región", "valle", "museo"),
}


def synthetic_article(language: str, index: int, rng: random.Random, n_sentences: int = 12) -> str:
    """A small wikitext article with a lead, headings, templates and links."""
    words = _WORDS[language]
    sentences = []
    for s in range(n_sentences):
        a, b = rng.choice(words), rng.choice(words)
        year = rng.randint(1400, 2020)
        sentences.append(
            f"The famous {a} number {index}-{s} was larger than the old {b} of {year}."
        )
    lead = " ".join(sentences[:4])
    body1 = " ".join(sentences[4:8])
    body2 = " ".join(sentences[8:])
    return (
        "{{Infobox place|name=Test|year=1900}}\n"
        f"{lead} See [[Other Place|the other place]].\n\n"
        "== History ==\n"
        f"{body1} <ref>Some citation</ref>\n\n"
        "== Geography ==\n"
        f"{body2}\n"
    )


def build_fixture_dump(path: Path, language: str, n_pages: int, seed: int = 7) -> Path:
    rng = random.Random(f"{seed}:{language}")
    pages = []
    for i in range(n_pages):
        title = f"{language.upper()} Article {i}"
        pages.append(page_xml(1000 + i, title, synthetic_article(language, i, rng)))
    dump_path = path / f"{language}wiki-fixture.xml"
    dump_path.write_text(dump_xml(pages), encoding="utf-8")
    return dump_path


@pytest.fixture
def fixture_dumps(tmp_path):
    """Roughly 20 pages across three languages (7 + 7 + 6)."""
    dumps = {}
    for language, count in (("en", 7), ("de", 7), ("es", 6)):
        dumps[language] = str(build_fixture_dump(tmp_path, language, count))
    return dumps


def make_pipeline_config(dumps: dict, out_dir: Path, seed: int = 42, enable_nli: bool = True):
    return PipelineConfig(
        languages=sorted(dumps),
        dumps=dumps,
        output_dir=str(out_dir),
        chat=ChatConfig(
            base_url="http://chat.test/v1",
            api_key="test-key",
            max_retries=2,
            backoff_seconds=0.01,
            concurrency=4,
        ),
        nli=NliConfig(base_url="http://nli.test", batch_size=16, backoff_seconds=0.01),
        entry_sample_size=50,
        seed=seed,
        enable_nli=enable_nli,
    )


def make_record(
    claim_id: str = "en:1:page_random_5:supports",
    target_class: ClaimClass = ClaimClass.SUPPORTS,
    category: str = "C1",
    quality: int = 5,
    self_contained: int = 5,
    claim: str = "The river is longer than the valley road.",
    source_text: str = "The river is longer than the valley road it follows.",
    language: str = "en",
    status: Status = Status.GENERATED,
) -> ClaimRecord:
    return ClaimRecord(
        claim_id=claim_id,
        source_id=claim_id.rsplit(":", 1)[0],
        topic="Test Topic",
        language=language,
        target_class=target_class,
        source_text=source_text,
        judgment=GenerationJudgment(
            claim=claim,
            self_contained=self_contained,
            category=category,
            supported_score=4,
            factual="real",
            objective=4,
            overall_quality=quality,
        ),
        word_count=len(claim.split()),
        status=status,
    )
