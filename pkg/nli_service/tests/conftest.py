"""Fixtures for service-level and integration tests."""

from __future__ import annotations

import json
import random
import socket
import threading
import time
from xml.sax.saxutils import escape

import httpx
import pytest
import uvicorn

from nli_service.app import create_app
from nli_service.backends import LexicalBackend


@pytest.fixture
def lexical_app():
    return create_app(LexicalBackend(), max_batch=64)


class RunningService:
    """A real uvicorn server on a random localhost port."""

    def __init__(self, app):
        self.port = _free_port()
        config = uvicorn.Config(app, host="127.0.0.1", port=self.port, log_level="warning")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    @property
    def base_url(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def __enter__(self) -> "RunningService":
        self.thread.start()
        deadline = time.monotonic() + 10
        while not self.server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("service did not start in time")
            time.sleep(0.01)
        return self

    def __exit__(self, *exc) -> None:
        self.server.should_exit = True
        self.thread.join(timeout=10)


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture
def running_service():
    with RunningService(create_app(LexicalBackend(), max_batch=64)) as service:
        yield service


# --- fixtures for driving the claim-generation pipeline ------------------------


_WORDS = {
    "en": ("river", "castle", "treaty", "mountain", "poet", "harbor", "bridge",
           "library", "festival", "region", "valley", "museum"),
    "de": ("Fluss", "Burg", "Vertrag", "Gebirge", "Dichter", "Hafen", "Brücke",
           "Bibliothek", "Fest", "Region", "Tal", "Museum"),
    "es": ("río", "castillo", "tratado", "montaña", "poeta", "puerto", "puente",
           "biblioteca", "festival", "región", "valle", "museo"),
}


def _article(language: str, index: int, rng: random.Random) -> str:
    words = _WORDS[language]
    sentences = [
        f"The famous {rng.choice(words)} number {index}-{s} was larger than "
        f"the old {rng.choice(words)} of {rng.randint(1400, 2020)}."
        for s in range(10)
    ]
    return (
        " ".join(sentences[:4])
        + "\n\n== History ==\n"
        + " ".join(sentences[4:])
        + "\n"
    )


def _page_xml(page_id: int, title: str, wikitext: str) -> str:
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


@pytest.fixture
def fixture_dumps(tmp_path):
    """20 plain-prose pages across three languages."""
    dumps = {}
    for language, count in (("en", 7), ("de", 7), ("es", 6)):
        rng = random.Random(f"7:{language}")
        pages = "\n".join(
            _page_xml(1000 + i, f"{language.upper()} Article {i}", _article(language, i, rng))
            for i in range(count)
        )
        path = tmp_path / f"{language}wiki.xml"
        path.write_text(
            '<mediawiki xmlns="http://www.mediawiki.org/xml/export-0.10/">\n'
            f"{pages}\n</mediawiki>\n",
            encoding="utf-8",
        )
        dumps[language] = str(path)
    return dumps


class CannedChatTransport(httpx.BaseTransport):
    """Deterministic chat endpoint: every judgment self-labels correctly with
    top scores, so the NLI stage alone decides what survives."""

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        prompt = json.loads(request.content)["messages"][0]["content"]
        judgment = self._judgment(prompt)
        return httpx.Response(
            200,
            json={"choices": [{"message": {"role": "assistant",
                                           "content": json.dumps(judgment, ensure_ascii=False)}}]},
        )

    @staticmethod
    def _judgment(prompt: str) -> dict:
        def clip(lead: str) -> str:
            start = prompt.find(lead)
            if start < 0:
                return ""
            start += len(lead)
            return prompt[start:prompt.find('"', start)]

        sources = clip('The evidence is: "') or clip('The sentence is: "')
        first = sources.split(". ")[0].rstrip(".") + "."
        if "falsified claim in" in prompt.split("{{")[0]:
            claim = f"It is not true that {first[0].lower()}{first[1:]}"
            category = "C0"
        elif "not verifiable based on the evidence provided" in prompt:
            claim = "A comet crossed the nebula beyond the asteroid telescope orbit."
            category = "C2"
        else:
            claim = first
            category = "C1"
        return {
            "CLAIM": claim,
            "SELF-CONTAINED": 5,
            "CATEGORY": category,
            "SUPPORTED BY ORIGINAL SENTENCE": 5 if category == "C1" else 1,
            "FACTUAL": "real",
            "OBJECTIVE": 5,
            "OVERALL QUALITY": 5,
        }
