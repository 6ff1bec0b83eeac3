"""Parsing of the model's structured self-assessment JSON."""

from __future__ import annotations

import json
import re

from .records import GenerationJudgment


class ParseFailure(Exception):
    """The model output carried no usable judgment."""


_FIELD_ALIASES = {
    "claim": "CLAIM",
    "self_contained": "SELF-CONTAINED",
    "category": "CATEGORY",
    "supported_score": "SUPPORTED BY ORIGINAL SENTENCE",
    "factual": "FACTUAL",
    "objective": "OBJECTIVE",
    "overall_quality": "OVERALL QUALITY",
}

_CATEGORY_RE = re.compile(r"\bC[012]\b")
_LEADING_INT_RE = re.compile(r"[1-5]")


def _first_json_object(raw: str) -> dict:
    """Extract the first balanced top-level {...} object, ignoring fences/prose."""
    depth = 0
    start = None
    in_string = False
    escaped = False
    for i, ch in enumerate(raw):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"' and depth > 0:
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}":
            if depth > 0:
                depth -= 1
                if depth == 0:
                    candidate = raw[start : i + 1]
                    try:
                        obj = json.loads(candidate)
                    except json.JSONDecodeError:
                        # Models sometimes echo the template's doubled braces.
                        try:
                            obj = json.loads(candidate.replace("{{", "{").replace("}}", "}"))
                        except json.JSONDecodeError as exc:
                            raise ParseFailure(f"unparseable JSON object: {exc}") from exc
                    if isinstance(obj, dict):
                        return obj
                    start = None
    raise ParseFailure("no JSON object found in model output")


def _lookup(obj: dict, field_name: str):
    wanted = _FIELD_ALIASES[field_name].lower()
    for key, value in obj.items():
        if str(key).strip().lower() == wanted:
            return value
    return None


def _coerce_score(value, field_name: str) -> int:
    """Accept 4, "4", "4/5" and similar; take the leading integer in [1, 5]."""
    if isinstance(value, bool):
        raise ParseFailure(f"{field_name}: boolean is not a score")
    if isinstance(value, int):
        score = value
    elif isinstance(value, float) and value.is_integer():
        score = int(value)
    elif isinstance(value, str):
        match = _LEADING_INT_RE.search(value)
        if not match:
            raise ParseFailure(f"{field_name}: no score in {value!r}")
        score = int(match.group())
    else:
        raise ParseFailure(f"{field_name}: cannot read a score from {value!r}")
    if not 1 <= score <= 5:
        raise ParseFailure(f"{field_name}: score {score} out of range")
    return score


def parse_generation(raw: str) -> GenerationJudgment:
    """Parse the assistant message content into a typed judgment.

    Field names are matched case-insensitively; CATEGORY may be embedded in
    a longer string ("C1 - supported"). Missing CLAIM or CATEGORY is a
    ParseFailure, never a crash.
    """
    obj = _first_json_object(raw)

    claim = _lookup(obj, "claim")
    if not isinstance(claim, str) or not claim.strip():
        raise ParseFailure("missing or empty CLAIM")

    category_raw = _lookup(obj, "category")
    if category_raw is None:
        raise ParseFailure("missing CATEGORY")
    match = _CATEGORY_RE.search(str(category_raw))
    if not match:
        raise ParseFailure(f"unmappable CATEGORY: {category_raw!r}")

    factual = _lookup(obj, "factual")

    return GenerationJudgment(
        claim=claim.strip(),
        self_contained=_coerce_score(_lookup(obj, "self_contained"), "SELF-CONTAINED"),
        category=match.group(),
        supported_score=_coerce_score(
            _lookup(obj, "supported_score"), "SUPPORTED BY ORIGINAL SENTENCE"
        ),
        factual=str(factual) if factual is not None else "",
        objective=_coerce_score(_lookup(obj, "objective"), "OBJECTIVE"),
        overall_quality=_coerce_score(_lookup(obj, "overall_quality"), "OVERALL QUALITY"),
    )


def serialize_judgment(judgment: GenerationJudgment) -> str:
    """Render a judgment back into the schema's JSON shape (round-trip aid)."""
    return json.dumps(
        {
            "CLAIM": judgment.claim,
            "SELF-CONTAINED": judgment.self_contained,
            "CATEGORY": judgment.category,
            "SUPPORTED BY ORIGINAL SENTENCE": judgment.supported_score,
            "FACTUAL": judgment.factual,
            "OBJECTIVE": judgment.objective,
            "OVERALL QUALITY": judgment.overall_quality,
        },
        ensure_ascii=False,
    )
