"""Tokenization and token-level annotation.

Documents are split into sentences and word tokens with exact character
offsets; every token carries a capitalization class. Lemmas and
proper-noun judgments come from a pluggable analyzer adapter with a
built-in heuristic fallback, so the pipeline runs with or without an
external NLP tool.
"""

from __future__ import annotations

import json
import logging
import re
import subprocess
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

# Word = letters/digits with internal hyphens or apostrophes ("tusko-bus"
# stays one token). Underscore is excluded from \w on purpose.
_WORD_RE = re.compile(r"[^\W_]+(?:['’‐-]?[^\W_]+)*", re.UNICODE)

DEFAULT_ABBREVIATIONS = frozenset(
    "np itd itp tzn tzw tj jw ok prof dr hab mgr inż ul al św gen płk "
    "ks im godz br r s nr m.in".split()
)


def cap_class(surface: str) -> str:
    """Capitalization class, a pure function of the surface string."""
    cased = [c for c in surface if c.isalpha()]
    if not cased:
        return "lower"
    if all(c.islower() for c in cased):
        return "lower"
    if all(c.isupper() for c in cased):
        return "all-upper" if len(cased) > 1 else "initial-upper"
    if surface[0].isupper() and all(c.islower() for c in cased[1:]):
        return "initial-upper"
    return "mixed"


@dataclass
class Token:
    surface: str
    start: int
    end: int
    sentence_index: int
    position_in_sentence: int
    cap_class: str
    lemma: Optional[str] = None
    is_proper_noun: Optional[bool] = None


@dataclass
class AnnotatedDocument:
    document: object  # ingest.Document; kept loose so analyze has no ingest import
    tokens: List[Token]
    analyzer_name: str
    sentences: List[Tuple[int, int]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def sentence_text(self, sentence_index: int) -> str:
        start, end = self.sentences[sentence_index]
        return self.document.text[start:end]


def split_sentences(
    text: str, abbreviations: Iterable[str] = DEFAULT_ABBREVIATIONS
) -> List[Tuple[int, int]]:
    """Sentence spans: boundaries at . ! ? followed by whitespace and an
    uppercase letter, unless the preceding word is a guarded abbreviation.
    """
    abbrevs = {a.lower().rstrip(".") for a in abbreviations}
    spans: List[Tuple[int, int]] = []
    start = 0
    for m in re.finditer(r"[.!?]+(\s+)", text):
        nxt = m.end()
        if nxt >= len(text) or not text[nxt].isupper():
            continue
        before = text[start : m.start()]
        last_word = re.findall(r"[^\W_]+(?:\.[^\W_]+)*", before, re.UNICODE)
        if last_word and last_word[-1].lower() in abbrevs:
            continue
        spans.append((start, m.start() + len(m.group(0)) - len(m.group(1))))
        start = nxt
    if start < len(text) and text[start:].strip():
        stripped_end = len(text.rstrip())
        spans.append((start, max(stripped_end, start)))
    return spans


def tokenize(
    text: str, abbreviations: Iterable[str] = DEFAULT_ABBREVIATIONS
) -> Tuple[List[Token], List[Tuple[int, int]]]:
    """Tokenize NFC text into ordered, non-overlapping word tokens with
    sentence indices and in-sentence positions. Returns (tokens, sentence spans).
    """
    sentences = split_sentences(text, abbreviations)
    tokens: List[Token] = []
    for s_idx, (s_start, s_end) in enumerate(sentences):
        position = 0
        for m in _WORD_RE.finditer(text, s_start, s_end):
            surface = m.group(0)
            tokens.append(
                Token(
                    surface=surface,
                    start=m.start(),
                    end=m.end(),
                    sentence_index=s_idx,
                    position_in_sentence=position,
                    cap_class=cap_class(surface),
                )
            )
            position += 1
    return tokens, sentences


def heuristic_proper_noun(token: Token) -> bool:
    """Mid-sentence initial capitalization reads as a likely named entity;
    sentence-initial capitalization is uninformative.
    """
    return token.cap_class == "initial-upper" and token.position_in_sentence > 0


class AdapterError(Exception):
    """Raised by adapters on transport or protocol failures."""


class AnalyzerAdapter:
    """Contract for external lemmatizers / NE taggers.

    ``capabilities`` is a subset of {"lemma", "proper-noun"}. Given the same
    (surface, sentence) input the output must be deterministic. ``analyze``
    may raise AdapterError; callers fall back per token.
    """

    name = "adapter"
    capabilities: frozenset = frozenset()

    def analyze(self, surface: str, sentence: Optional[str] = None) -> dict:
        raise NotImplementedError

    def lemmatize(self, surface: str) -> str:
        out = self.analyze(surface)
        lemma = out.get("lemma")
        return lemma if lemma else fallback_lemma(surface)

    def lemmatize_in_context(self, surface: str, sentence: str) -> str:
        out = self.analyze(surface, sentence)
        lemma = out.get("lemma")
        return lemma if lemma else fallback_lemma(surface)


class IdentityAdapter(AnalyzerAdapter):
    """Fallback-only adapter: identity-lowercase lemmas, heuristic NE."""

    name = "identity"
    capabilities = frozenset()

    def analyze(self, surface: str, sentence: Optional[str] = None) -> dict:
        return {}


class StaticAdapter(AnalyzerAdapter):
    """Table-driven adapter for tests and offline runs.

    ``lemmas`` maps lowercased surface -> lemma; ``proper_nouns`` is a set of
    lowercased surfaces judged to be proper nouns.
    """

    def __init__(self, lemmas=None, proper_nouns=None, name="static"):
        self.name = name
        self._lemmas = {k.lower(): v for k, v in (lemmas or {}).items()}
        self._proper = {p.lower() for p in (proper_nouns or set())}
        caps = set()
        if lemmas is not None:
            caps.add("lemma")
        if proper_nouns is not None:
            caps.add("proper-noun")
        self.capabilities = frozenset(caps)

    def analyze(self, surface: str, sentence: Optional[str] = None) -> dict:
        out = {}
        key = surface.lower()
        if "lemma" in self.capabilities and key in self._lemmas:
            out["lemma"] = self._lemmas[key]
        if "proper-noun" in self.capabilities:
            out["proper_noun"] = key in self._proper
        return out


class JsonlSubprocessAdapter(AnalyzerAdapter):
    """Adapter over a line-delimited JSON subprocess.

    Protocol: one request per line ``{"surface": ..., "sentence": ...}``,
    one response per line ``{"lemma": ..., "proper_noun": ...}``.
    """

    def __init__(self, command: Sequence[str], name="subprocess",
                 capabilities=("lemma", "proper-noun"), timeout: float = 10.0):
        self.name = name
        self.capabilities = frozenset(capabilities)
        self.command = list(command)
        self.timeout = timeout
        self._proc: Optional[subprocess.Popen] = None

    def _ensure_process(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        return self._proc

    def analyze(self, surface: str, sentence: Optional[str] = None) -> dict:
        import select

        request = {"surface": surface}
        if sentence is not None:
            request["sentence"] = sentence
        try:
            proc = self._ensure_process()
            proc.stdin.write(json.dumps(request, ensure_ascii=False) + "\n")
            proc.stdin.flush()
            ready, _, _ = select.select([proc.stdout], [], [], self.timeout)
            if not ready:
                raise AdapterError(f"analyzer timed out after {self.timeout}s")
            line = proc.stdout.readline()
            if not line:
                raise AdapterError("analyzer subprocess closed its output")
            return json.loads(line)
        except (OSError, ValueError) as exc:
            raise AdapterError(f"analyzer subprocess failed: {exc}") from exc

    def close(self):
        if self._proc is not None and self._proc.poll() is None:
            self._proc.terminate()
            self._proc.wait(timeout=5)


class HttpAnalyzerAdapter(AnalyzerAdapter):
    """Adapter over an HTTP endpoint speaking the same request/response JSON."""

    def __init__(self, url: str, name="http", capabilities=("lemma", "proper-noun"),
                 timeout: float = 10.0):
        self.name = name
        self.capabilities = frozenset(capabilities)
        self.url = url
        self.timeout = timeout

    def analyze(self, surface: str, sentence: Optional[str] = None) -> dict:
        import requests

        payload = {"surface": surface}
        if sentence is not None:
            payload["sentence"] = sentence
        try:
            resp = requests.post(self.url, json=payload, timeout=self.timeout)
            resp.raise_for_status()
            return resp.json()
        except Exception as exc:
            raise AdapterError(f"analyzer endpoint failed: {exc}") from exc


def fallback_lemma(surface: str) -> str:
    return unicodedata.normalize("NFC", surface).lower()


def annotate(document, adapter: Optional[AnalyzerAdapter] = None) -> AnnotatedDocument:
    """Attach lemma and proper-noun judgments to every token.

    The adapter is consulted only for Polish documents; other languages get
    fallback annotations (identity-lowercase lemma, capitalization heuristic).
    Per-token adapter failures fall back in isolation and are recorded as
    warnings; annotation never aborts the document.
    """
    adapter = adapter or IdentityAdapter()
    tokens, sentences = tokenize(document.text)
    annotated = AnnotatedDocument(
        document=document,
        tokens=tokens,
        analyzer_name=adapter.name,
        sentences=sentences,
    )
    use_adapter = document.language == "pl" and adapter.capabilities
    for token in tokens:
        result = {}
        if use_adapter:
            try:
                sentence = annotated.sentence_text(token.sentence_index)
                result = adapter.analyze(token.surface, sentence)
            except AdapterError as exc:
                msg = f"adapter {adapter.name} failed on {token.surface!r}: {exc}"
                annotated.warnings.append(msg)
                logger.warning(msg)
                result = {}
        lemma = result.get("lemma") if "lemma" in adapter.capabilities else None
        token.lemma = lemma if lemma else fallback_lemma(token.surface)
        proper = result.get("proper_noun") if "proper-noun" in adapter.capabilities else None
        token.is_proper_noun = proper if proper is not None else heuristic_proper_noun(token)
    return annotated
