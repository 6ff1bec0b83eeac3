"""Best-effort wikitext to plain text stripping.

Not a full parser: templates, tables, refs, comments and file links are
removed, internal links are replaced by their label, and everything else is
kept. Unbalanced markup never raises; leftovers are dropped or passed
through as text.
"""

from __future__ import annotations

import html
import re

_COMMENT_RE = re.compile(r"<!--.*?-->", re.DOTALL)
_REF_BLOCK_RE = re.compile(r"<ref[^>/]*>.*?</ref>", re.DOTALL | re.IGNORECASE)
_REF_SELFCLOSE_RE = re.compile(r"<ref[^>]*/\s*>", re.IGNORECASE)
_REMOVED_BLOCK_RE = re.compile(
    r"<(gallery|timeline|math|score|imagemap|syntaxhighlight|source|code|pre)\b[^>]*>.*?</\1\s*>",
    re.DOTALL | re.IGNORECASE,
)
_TAG_RE = re.compile(r"</?[a-zA-Z][^>]*>")
_HEADING_RE = re.compile(r"^={2,6}[^=\n][^\n]*?={2,6}[ \t]*$", re.MULTILINE)
_EXTERNAL_LINK_RE = re.compile(r"\[(?:https?|ftp)://\S*(?:\s+([^\]]*))?\]")
_BARE_URL_RE = re.compile(r"(?:https?|ftp)://\S+")
_MAGIC_WORD_RE = re.compile(r"__[A-Z]+__")
_LIST_MARKER_RE = re.compile(r"^[*#;:]+\s*", re.MULTILINE)
_QUOTES_RE = re.compile(r"'{2,5}")

# Namespace prefixes for media links, across the pipeline's languages.
_FILE_PREFIXES = (
    "file:", "image:", "media:", "category:",
    "datei:", "bild:", "kategorie:",
    "archivo:", "imagen:", "categoría:",
)


def _drop_nested(text: str, open_mark: str, close_mark: str) -> str:
    """Remove balanced nested regions; unbalanced openers are dropped to end of text."""
    out: list[str] = []
    depth = 0
    i = 0
    n = len(text)
    olen, clen = len(open_mark), len(close_mark)
    while i < n:
        if text.startswith(open_mark, i):
            depth += 1
            i += olen
        elif depth and text.startswith(close_mark, i):
            depth -= 1
            i += clen
        elif depth:
            i += 1
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _replace_links(text: str) -> str:
    """Rewrite [[target|label]] to label, [[target]] to target; drop media links."""
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        if text.startswith("[[", i):
            depth = 1
            j = i + 2
            while j < n and depth:
                if text.startswith("[[", j):
                    depth += 1
                    j += 2
                elif text.startswith("]]", j):
                    depth -= 1
                    j += 2
                else:
                    j += 1
            inner = text[i + 2 : j - 2] if depth == 0 else text[i + 2 :]
            lowered = inner.lstrip().lower()
            if not any(lowered.startswith(p) for p in _FILE_PREFIXES):
                # Nested links inside the label resolve recursively.
                inner = _replace_links(inner)
                label = inner.rsplit("|", 1)[-1] if "|" in inner else inner
                out.append(label)
            i = j if depth == 0 else n
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _normalize_whitespace(text: str) -> str:
    paragraphs = []
    for block in re.split(r"\n\s*\n", text):
        collapsed = " ".join(block.split())
        if collapsed:
            paragraphs.append(collapsed)
    return "\n\n".join(paragraphs)


def strip_markup(wikitext: str) -> str:
    """Strip wikitext markup, returning plain paragraphs separated by blank lines.

    Section headings are removed from the output but act as paragraph
    boundaries, so no sentence straddles a heading.
    """
    text = _COMMENT_RE.sub("", wikitext)
    text = _REF_BLOCK_RE.sub("", text)
    text = _REF_SELFCLOSE_RE.sub("", text)
    text = _REMOVED_BLOCK_RE.sub("", text)
    text = _drop_nested(text, "{{", "}}")
    text = _drop_nested(text, "{|", "|}")
    text = _HEADING_RE.sub("\n", text)
    text = _replace_links(text)
    text = _EXTERNAL_LINK_RE.sub(lambda m: m.group(1) or "", text)
    text = _BARE_URL_RE.sub("", text)
    text = _QUOTES_RE.sub("", text)
    text = _TAG_RE.sub(" ", text)
    text = _MAGIC_WORD_RE.sub("", text)
    text = _LIST_MARKER_RE.sub("", text)
    text = html.unescape(text)
    return _normalize_whitespace(text)


def summary_region(wikitext: str) -> str:
    """Wikitext before the first section heading (the lead/summary region)."""
    match = _HEADING_RE.search(wikitext)
    return wikitext[: match.start()] if match else wikitext
