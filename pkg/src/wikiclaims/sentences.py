"""Rule-based sentence segmentation with per-language abbreviation guards."""

from __future__ import annotations

import re

# Abbreviations that must never terminate a sentence, stored without the
# trailing period, case-sensitive. Single letters ("J.", "z.") are guarded
# by a separate rule, which also covers multiword forms like "z. B." and
# "J. R. R.".
COMMON_ABBREVIATIONS = frozenset({
    "Dr", "Sr", "Jr", "Prof", "St", "Mr", "Mrs", "Ms", "vs", "etc", "approx",
    "e.g", "i.e", "cf", "al", "No",
})

LANGUAGE_ABBREVIATIONS: dict[str, frozenset[str]] = {
    "en": frozenset({"Mt", "Ave", "Gen", "Col", "Capt", "Sgt", "Rev", "Hon"}),
    "de": frozenset({
        "bzw", "usw", "bspw", "ca", "evtl", "ggf", "inkl", "Nr", "Abs",
        "Art", "Bd", "Jh", "Jhd", "sog", "u.a", "d.h", "z.B", "o.ä", "Str",
    }),
    "es": frozenset({
        "Sra", "Srta", "Ud", "Uds", "núm", "pág", "págs", "tel", "Av",
        "Avda", "Gral", "Dpto", "aprox",
    }),
}

_TERMINATORS = ".!?…"
_CLOSERS = "\"'”’»)]"


def abbreviations_for(language: str) -> frozenset[str]:
    return COMMON_ABBREVIATIONS | LANGUAGE_ABBREVIATIONS.get(language, frozenset())


def _is_guarded(word: str, language: str, abbreviations: frozenset[str]) -> bool:
    """True when the period-terminated word must not end a sentence."""
    stem = word.rstrip(".")
    if not stem:
        return True
    if stem in abbreviations:
        return True
    # Initials and single-letter abbreviations: "J." in "J. R. R.", "z." in "z. B."
    if len(stem) == 1 and stem.isalpha():
        return True
    # German ordinal numbers: "19. Jahrhundert"
    if language == "de" and stem.isdigit():
        return True
    return False


def _split_paragraph(paragraph: str, language: str, abbreviations: frozenset[str]) -> list[str]:
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(paragraph)
    while i < n:
        ch = paragraph[i]
        if ch not in _TERMINATORS:
            i += 1
            continue
        # Consume the full punctuation run plus trailing closers.
        end = i + 1
        while end < n and paragraph[end] in _TERMINATORS:
            end += 1
        while end < n and paragraph[end] in _CLOSERS:
            end += 1
        at_boundary = end >= n or paragraph[end].isspace()
        if not at_boundary:
            i = end
            continue
        if ch == "." and paragraph[i : end].startswith("."):
            word_start = i
            while word_start > start and not paragraph[word_start - 1].isspace():
                word_start -= 1
            word = paragraph[word_start : i + 1]
            if _is_guarded(word, language, abbreviations):
                i = end
                continue
        # Require an upper-case letter, digit or opener to start the next sentence.
        j = end
        while j < n and paragraph[j].isspace():
            j += 1
        if j < n and paragraph[j].islower():
            i = end
            continue
        sentence = paragraph[start:end].strip()
        if sentence:
            sentences.append(sentence)
        start = end
        i = end
    tail = paragraph[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def split_sentences(text: str, language: str) -> list[str]:
    """Segment plain text into sentences; paragraph breaks always split."""
    abbreviations = abbreviations_for(language)
    sentences: list[str] = []
    for paragraph in re.split(r"\n+", text):
        paragraph = paragraph.strip()
        if paragraph:
            sentences.extend(_split_paragraph(paragraph, language, abbreviations))
    return sentences
