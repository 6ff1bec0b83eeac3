"""Streaming reader for MediaWiki XML exports (plain, .bz2 or .gz)."""

from __future__ import annotations

import bz2
import gzip
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import IO, Iterator, Union

from .records import RawPage


class DumpFormatError(Exception):
    """Malformed XML or an unsupported container format."""


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def open_dump(path: Union[str, Path]) -> IO[bytes]:
    """Open a dump file, picking decompression by extension."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".bz2":
        return bz2.open(path, "rb")
    if suffix == ".gz":
        return gzip.open(path, "rb")
    if suffix == ".xml":
        return open(path, "rb")
    raise DumpFormatError(
        f"unsupported dump extension {suffix!r} for {path} (expected .xml, .xml.bz2 or .xml.gz)"
    )


def stream_pages(source: Union[str, Path, IO[bytes]], language: str) -> Iterator[RawPage]:
    """Yield article-namespace pages in document order.

    Uses iterparse with element clearing, so memory stays bounded by the
    largest single page regardless of dump size. Redirects, empty pages and
    non-zero namespaces are skipped.
    """
    stream = open_dump(source) if isinstance(source, (str, Path)) else source
    owns_stream = isinstance(source, (str, Path))
    try:
        context = ET.iterparse(stream, events=("end",))
        try:
            for _event, elem in context:
                if _local(elem.tag) != "page":
                    continue
                page = _page_from_element(elem, language)
                elem.clear()
                if page is not None:
                    yield page
        except ET.ParseError as exc:
            raise DumpFormatError(
                f"malformed XML at line {exc.position[0]}, column {exc.position[1]}: {exc}"
            ) from exc
    finally:
        if owns_stream:
            stream.close()


def _page_from_element(elem: ET.Element, language: str) -> RawPage | None:
    title = ""
    namespace = 0
    page_id = 0
    wikitext = ""
    is_redirect = False
    for child in elem:
        tag = _local(child.tag)
        if tag == "title":
            title = child.text or ""
        elif tag == "ns":
            namespace = int(child.text or 0)
        elif tag == "id" and page_id == 0:
            page_id = int(child.text or 0)
        elif tag == "redirect":
            is_redirect = True
        elif tag == "revision":
            for sub in child:
                if _local(sub.tag) == "text":
                    wikitext = sub.text or ""
                    break
    if namespace != 0 or is_redirect or not wikitext.strip():
        return None
    return RawPage(
        page_id=page_id,
        title=title,
        namespace=namespace,
        wikitext=wikitext,
        language=language,
    )
