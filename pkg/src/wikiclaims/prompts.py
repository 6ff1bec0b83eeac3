"""Versioned prompt templates and placeholder substitution."""

from __future__ import annotations

from importlib import resources

from .records import ClaimClass

PLACEHOLDERS = ("<language>", "<topic>", "<sources>")

LANGUAGE_NAMES = {
    "en": "English",
    "de": "German",
    "es": "Spanish",
}

_TEMPLATE_FILES = {
    ClaimClass.SUPPORTS: "supports.txt",
    ClaimClass.REFUTES: "refutes.txt",
    ClaimClass.NOT_INFO: "not_info.txt",
}

DEFAULT_PROMPT_VERSION = "v1"


class PromptConfigError(Exception):
    """Unknown class, language, or prompt version."""


def load_template(claim_class: ClaimClass, version: str = DEFAULT_PROMPT_VERSION) -> str:
    if claim_class not in _TEMPLATE_FILES:
        raise PromptConfigError(f"unknown claim class: {claim_class!r}")
    try:
        root = resources.files("wikiclaims") / "prompts" / version
        return (root / _TEMPLATE_FILES[claim_class]).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise PromptConfigError(f"no prompt templates for version {version!r}") from None


def language_name(code: str) -> str:
    try:
        return LANGUAGE_NAMES[code]
    except KeyError:
        raise PromptConfigError(f"language {code!r} has no configured display name") from None


def build_prompt(
    claim_class: ClaimClass,
    language: str,
    topic: str,
    sources: str,
    version: str = DEFAULT_PROMPT_VERSION,
) -> str:
    """Substitute placeholders into the class template; no other mutation.

    `language` is the display name shown to the model (e.g. "German"),
    not the ISO code.
    """
    if not topic:
        raise ValueError("topic must be non-empty")
    if not sources:
        raise ValueError("sources must be non-empty")
    template = load_template(claim_class, version)
    return (
        template.replace("<language>", language)
        .replace("<topic>", topic)
        .replace("<sources>", sources)
    )
