"""Feed polling, main-content extraction and document identity.

Feeds are plain RSS/Atom XML. Page markup is reduced to plain text with a
text-density heuristic: the block container with the most non-link text
wins, so navigation chrome and script/style payloads drop out without
site-specific rules.
"""

from __future__ import annotations

import hashlib
import re
import unicodedata
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone
from html import unescape
from html.parser import HTMLParser
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Set, Tuple
from urllib.parse import urlsplit, urlunsplit

from .langid import detect_language


class IngestError(Exception):
    pass


@dataclass(frozen=True)
class FeedSource:
    url: str
    poll_interval: int = 3600
    enabled: bool = True

    def __post_init__(self):
        parts = urlsplit(self.url)
        if not parts.scheme or not parts.netloc:
            raise IngestError(f"feed url is not absolute: {self.url!r}")
        if self.poll_interval < 60:
            raise IngestError(f"poll_interval must be >= 60, got {self.poll_interval}")


@dataclass
class Document:
    id: str
    url: str
    host_domain: str
    fetched_at: datetime
    language: str
    language_confidence: float
    text: str

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "url": self.url,
            "host_domain": self.host_domain,
            "fetched_at": self.fetched_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "language": {"code": self.language, "confidence": self.language_confidence},
            "text": self.text,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Document":
        return cls(
            id=data["id"],
            url=data["url"],
            host_domain=data["host_domain"],
            fetched_at=datetime.strptime(data["fetched_at"], "%Y-%m-%dT%H:%M:%SZ").replace(
                tzinfo=timezone.utc
            ),
            language=data["language"]["code"],
            language_confidence=data["language"]["confidence"],
            text=data["text"],
        )


_SECOND_LEVEL = {"co", "com", "net", "org", "gov", "edu", "ac"}


def canonical_url(url: str) -> str:
    parts = urlsplit(url.strip())
    netloc = parts.netloc.lower()
    if netloc.endswith(":80") or netloc.endswith(":443"):
        netloc = netloc.rsplit(":", 1)[0]
    path = parts.path.rstrip("/") or "/"
    return urlunsplit((parts.scheme.lower(), netloc, path, parts.query, ""))


def registrable_domain(url: str) -> str:
    host = urlsplit(url).netloc.lower().split(":")[0]
    if host.startswith("www."):
        host = host[4:]
    labels = host.split(".")
    if len(labels) >= 3 and labels[-2] in _SECOND_LEVEL:
        return ".".join(labels[-3:])
    if len(labels) >= 2:
        return ".".join(labels[-2:])
    return host


def document_id(url: str, text: str) -> str:
    payload = canonical_url(url) + "\n" + text
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def make_document(url: str, text: str, fetched_at: Optional[datetime] = None) -> Document:
    code, confidence = detect_language(text)
    return Document(
        id=document_id(url, text),
        url=url,
        host_domain=registrable_domain(url),
        fetched_at=fetched_at or datetime.now(timezone.utc),
        language=code,
        language_confidence=confidence,
        text=text,
    )


# --- main content extraction -------------------------------------------------

_DROP_TAGS = {"script", "style", "noscript", "template", "svg", "iframe",
              "nav", "header", "footer", "aside", "form", "button"}
_BLOCK_TAGS = {"p", "div", "article", "section", "main", "body", "li", "td",
               "blockquote", "pre", "h1", "h2", "h3", "h4", "h5", "h6", "br",
               "tr", "ul", "ol", "table", "figcaption"}
_CONTAINER_TAGS = ("article", "main", "section", "div", "td", "body")


class _Node:
    __slots__ = ("tag", "parent", "children", "chunks")

    def __init__(self, tag: str, parent: Optional["_Node"]):
        self.tag = tag
        self.parent = parent
        self.children: List["_Node"] = []
        self.chunks: List[Tuple[str, bool]] = []  # (text, inside_anchor)


class _ContentParser(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = _Node("body", None)
        self.current = self.root
        self.drop_depth = 0
        self.anchor_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _DROP_TAGS:
            self.drop_depth += 1
            return
        if self.drop_depth:
            return
        if tag == "a":
            self.anchor_depth += 1
        if tag in _BLOCK_TAGS and tag != "br":
            node = _Node(tag, self.current)
            self.current.children.append(node)
            self.current = node
        elif tag == "br":
            self.current.chunks.append(("\n", False))

    def handle_endtag(self, tag):
        if tag in _DROP_TAGS:
            self.drop_depth = max(0, self.drop_depth - 1)
            return
        if self.drop_depth:
            return
        if tag == "a":
            self.anchor_depth = max(0, self.anchor_depth - 1)
        if tag in _BLOCK_TAGS and tag != "br":
            node = self.current
            while node.parent is not None:
                if node.tag == tag:
                    self.current = node.parent
                    return
                node = node.parent

    def handle_data(self, data):
        if self.drop_depth or not data.strip():
            return
        self.current.chunks.append((data, self.anchor_depth > 0))


def _collect_text(node: _Node, parts: List[Tuple[str, bool]]):
    for text, in_anchor in node.chunks:
        parts.append((text, in_anchor))
    for child in node.children:
        parts.append(("\n", False))
        _collect_text(child, parts)


def _score(node: _Node) -> float:
    """Non-link text mass of the subtree; link text counts against it."""
    parts: List[Tuple[str, bool]] = []
    _collect_text(node, parts)
    plain = sum(len(t.strip()) for t, a in parts if not a)
    linked = sum(len(t.strip()) for t, a in parts if a)
    return plain - 0.5 * linked


def _render(node: _Node) -> str:
    parts: List[Tuple[str, bool]] = []
    _collect_text(node, parts)
    text = "".join(t for t, _ in parts)
    text = re.sub(r"[ \t]+", " ", text)
    lines = [ln.strip() for ln in text.split("\n")]
    return "\n".join(ln for ln in lines if ln)


def _decode(html: bytes | str) -> str:
    if isinstance(html, str):
        return html
    try:
        return html.decode("utf-8")
    except UnicodeDecodeError:
        m = re.search(rb'charset=["\']?([A-Za-z0-9_-]+)', html[:2048])
        if m:
            try:
                return html.decode(m.group(1).decode("ascii"))
            except (UnicodeDecodeError, LookupError) as exc:
                raise IngestError(f"cannot decode page: {exc}") from exc
        raise IngestError("cannot decode page: input is not valid UTF-8")


def extract_main_content(html: bytes | str) -> str:
    """Plain text of the dominant content region.

    Boilerplate tags are dropped outright; among the remaining block
    containers the one with the highest non-link text density wins.
    Paragraph boundaries become newline characters. Empty pages yield "".
    """
    markup = unicodedata.normalize("NFC", unescape(_decode(html)))
    parser = _ContentParser()
    parser.feed(markup)
    parser.close()

    candidates: List[_Node] = []

    def walk(node: _Node):
        if node.tag in _CONTAINER_TAGS:
            candidates.append(node)
        for child in node.children:
            walk(child)

    walk(parser.root)
    if not candidates:
        candidates = [parser.root]
    best = max(candidates, key=_score)
    if _score(best) <= 0:
        return ""
    return _render(best)


# --- feed polling ------------------------------------------------------------

Fetcher = Callable[[str], bytes]


def default_fetcher(url: str) -> bytes:
    import requests

    resp = requests.get(url, timeout=30, headers={"User-Agent": "neolog/0.1"})
    resp.raise_for_status()
    return resp.content


@dataclass
class PollResult:
    documents: List[Document] = field(default_factory=list)
    errors: List[Tuple[str, str]] = field(default_factory=list)  # (source url, message)
    dropped: List[str] = field(default_factory=list)  # item urls with empty content


def _feed_items(feed_xml: bytes) -> List[dict]:
    root = ET.fromstring(feed_xml)

    def strip_ns(tag: str) -> str:
        return tag.rsplit("}", 1)[-1]

    items = []
    for el in root.iter():
        if strip_ns(el.tag) not in ("item", "entry"):
            continue
        item = {"link": None, "html": None}
        for child in el:
            name = strip_ns(child.tag)
            if name == "link":
                item["link"] = (child.text or "").strip() or child.get("href")
            elif name in ("description", "summary", "content", "encoded"):
                if child.text and child.text.strip():
                    item["html"] = child.text
        if item["link"]:
            items.append(item)
    return items


def load_feed_list(path: str | Path) -> List[FeedSource]:
    """Feed list file: one feed URL per line, '#' comments allowed."""
    sources = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            sources.append(FeedSource(url=line))
    return sources


def poll_feeds(
    sources: Iterable[FeedSource],
    fetch: Optional[Fetcher] = None,
    seen_ids: Optional[Set[str]] = None,
    now: Optional[datetime] = None,
) -> PollResult:
    """Fetch every enabled feed once and return the new documents.

    Each feed item yields at most one document; ids already in ``seen_ids``
    are skipped, and per-source failures are recorded without aborting the
    batch. New ids are added to ``seen_ids`` as they are produced.
    """
    if fetch is None:
        fetch = default_fetcher
    seen = seen_ids if seen_ids is not None else set()
    enabled = [s for s in sources if s.enabled]
    if not enabled:
        raise IngestError("no enabled feed sources")
    result = PollResult()
    for source in enabled:
        try:
            feed_xml = fetch(source.url)
            items = _feed_items(feed_xml)
        except Exception as exc:
            result.errors.append((source.url, f"feed fetch/parse failed: {exc}"))
            continue
        for item in items:
            url = item["link"]
            try:
                page = fetch(url)
            except Exception as exc:
                if item["html"] is None:
                    result.errors.append((source.url, f"item fetch failed for {url}: {exc}"))
                    continue
                page = item["html"]
            try:
                text = extract_main_content(page)
            except IngestError as exc:
                result.errors.append((source.url, f"extraction failed for {url}: {exc}"))
                continue
            if not text:
                result.dropped.append(url)
                continue
            doc = make_document(url, text, fetched_at=now)
            if doc.id in seen:
                continue
            seen.add(doc.id)
            result.documents.append(doc)
    return result
