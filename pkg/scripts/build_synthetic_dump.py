#!/usr/bin/env python3
"""Generate a synthetic MediaWiki XML dump for offline smoke testing.

Pages carry the markup a real dump contains (infoboxes, headings, refs,
links, tables, lists) around plain prose, so the full parse-and-sample
path can be exercised without downloading anything.
"""

from __future__ import annotations

import random
from pathlib import Path
from xml.sax.saxutils import escape

import click

WORDS = {
    "en": ("river", "castle", "treaty", "mountain", "poet", "harbor", "bridge",
           "library", "festival", "region", "valley", "museum"),
    "de": ("Fluss", "Burg", "Vertrag", "Gebirge", "Dichter", "Hafen", "Brücke",
           "Bibliothek", "Fest", "Region", "Tal", "Museum"),
    "es": ("río", "castillo", "tratado", "montaña", "poeta", "puerto", "puente",
           "biblioteca", "festival", "región", "valle", "museo"),
}


def article(language: str, index: int, rng: random.Random) -> str:
    words = WORDS[language]
    sentences = [
        f"The famous {rng.choice(words)} number {index}-{s} was larger than "
        f"the old {rng.choice(words)} of {rng.randint(1400, 2020)}."
        for s in range(12)
    ]
    return (
        "{{Infobox place|name=Place|year=1900}}\n"
        + " ".join(sentences[:4])
        + " See [[Other Place|the other place]].\n\n== History ==\n"
        + " ".join(sentences[4:8])
        + " <ref>Some citation</ref>\n\n== Geography ==\n"
        + " ".join(sentences[8:])
        + "\n"
    )


def page_xml(page_id: int, title: str, wikitext: str) -> str:
    return (
        "  <page>\n"
        f"    <title>{escape(title)}</title>\n"
        "    <ns>0</ns>\n"
        f"    <id>{page_id}</id>\n"
        "    <revision>\n"
        f"      <id>{page_id * 10}</id>\n"
        f'      <text xml:space="preserve">{escape(wikitext)}</text>\n'
        "    </revision>\n"
        "  </page>"
    )


@click.command()
@click.option("--out-dir", type=click.Path(), default="fixtures", show_default=True)
@click.option("--languages", default="en,de,es", show_default=True)
@click.option("--pages", default=20, show_default=True, type=int)
@click.option("--seed", default=7, show_default=True, type=int)
def main(out_dir: str, languages: str, pages: int, seed: int) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for language in languages.split(","):
        language = language.strip()
        rng = random.Random(f"{seed}:{language}")
        body = "\n".join(
            page_xml(1000 + i, f"{language.upper()} Article {i}", article(language, i, rng))
            for i in range(pages)
        )
        path = out / f"{language}wiki-synthetic.xml"
        path.write_text(
            '<mediawiki xmlns="http://www.mediawiki.org/xml/export-0.10/">\n'
            f"{body}\n</mediawiki>\n",
            encoding="utf-8",
        )
        click.echo(f"wrote {pages} pages to {path}")


if __name__ == "__main__":
    main()
