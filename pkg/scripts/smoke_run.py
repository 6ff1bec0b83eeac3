#!/usr/bin/env python3
"""Offline end-to-end smoke run: synthetic dumps, canned chat, heuristic NLI.

Builds a small three-language fixture, runs the whole pipeline against
in-process mock endpoints, and prints the run report. Useful to sanity-check
an install without any credentials or network access.
"""

from __future__ import annotations

import json
import re
import subprocess
import sys
import tempfile
from pathlib import Path

import click
import httpx

import wikiclaims.pipeline as pl
from wikiclaims.chat import ChatConfig
from wikiclaims.config import PipelineConfig
from wikiclaims.filtering import NliConfig

NEGATION_CUES = {"not", "no", "never", "nicht", "kein", "keine", "nunca", "jamás"}


class CannedChat(httpx.BaseTransport):
    """Deterministic chat endpoint: every judgment self-labels correctly."""

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        prompt = json.loads(request.content)["messages"][0]["content"]

        def clip(lead: str) -> str:
            start = prompt.find(lead)
            if start < 0:
                return ""
            start += len(lead)
            return prompt[start:prompt.find('"', start)]

        sources = clip('The evidence is: "') or clip('The sentence is: "')
        first = sources.split(". ")[0].rstrip(".") + "."
        if "falsified claim in" in prompt.split("{{")[0]:
            claim, category = f"It is not true that {first[0].lower()}{first[1:]}", "C0"
        elif "not verifiable based on the evidence provided" in prompt:
            claim, category = "A comet crossed the nebula beyond the telescope orbit.", "C2"
        else:
            claim, category = first, "C1"
        judgment = {
            "CLAIM": claim, "SELF-CONTAINED": 5, "CATEGORY": category,
            "SUPPORTED BY ORIGINAL SENTENCE": 5 if category == "C1" else 1,
            "FACTUAL": "real", "OBJECTIVE": 5, "OVERALL QUALITY": 5,
        }
        return httpx.Response(200, json={
            "choices": [{"message": {"role": "assistant",
                                     "content": json.dumps(judgment, ensure_ascii=False)}}],
        })


class HeuristicNli(httpx.BaseTransport):
    """Lexical-overlap NLI endpoint speaking the /v1/nli protocol."""

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        if request.url.path == "/v1/health":
            return httpx.Response(200, json={"status": "ok", "model": "lexical-overlap-stub"})
        pairs = json.loads(request.content)["pairs"]
        results = []
        for premise, hypothesis in pairs:
            prem = set(re.findall(r"\w+", premise.lower()))
            hyp = set(re.findall(r"\w+", hypothesis.lower()))
            if (hyp & NEGATION_CUES) - prem:
                probs = {"entailment": 0.1, "neutral": 0.2, "contradiction": 0.7}
            elif hyp and len(hyp & prem) / len(hyp) >= 0.6:
                probs = {"entailment": 0.7, "neutral": 0.2, "contradiction": 0.1}
            else:
                probs = {"entailment": 0.2, "neutral": 0.6, "contradiction": 0.2}
            results.append({"label": max(probs, key=probs.get), "probs": probs})
        return httpx.Response(200, json={"results": results})


@click.command()
@click.option("--pages", default=10, show_default=True, type=int)
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--keep", type=click.Path(), default=None,
              help="Directory to keep the outputs in (default: temp dir).")
def main(pages: int, seed: int, keep: str | None) -> None:
    workdir = Path(keep) if keep else Path(tempfile.mkdtemp(prefix="smoke-run-"))
    fixtures = workdir / "fixtures"
    subprocess.run(
        [sys.executable, str(Path(__file__).with_name("build_synthetic_dump.py")),
         "--out-dir", str(fixtures), "--pages", str(pages), "--seed", str(seed)],
        check=True,
    )
    dumps = {p.name.split("wiki-")[0]: str(p) for p in sorted(fixtures.glob("*.xml"))}
    config = PipelineConfig(
        languages=sorted(dumps),
        dumps=dumps,
        output_dir=str(workdir / "out"),
        chat=ChatConfig(base_url="http://chat.local/v1", backoff_seconds=0.01, concurrency=4),
        nli=NliConfig(base_url="http://nli.local", batch_size=16),
        entry_sample_size=max(pages, 1),
        seed=seed,
    )
    report = pl.run_pipeline(config, chat_transport=CannedChat(), nli_transport=HeuristicNli())
    click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    click.echo(f"outputs in {workdir / 'out'}")


if __name__ == "__main__":
    main()
