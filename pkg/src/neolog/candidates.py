"""Candidate extraction, counter accumulation, variant consolidation and
lemma grouping.

Accumulation is order-independent: counters add, identity sets union, and
the sampled contexts are the N earliest distinct sentences under the total
order (timestamp, document id, sentence text), so partial accumulators can
be merged in any order with the same result.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .analyze import AdapterError, AnalyzerAdapter, AnnotatedDocument, fallback_lemma
from .lexicon import ReferenceLexicon, normalize_form

CONTEXT_SAMPLE_SIZE = 10


@dataclass(frozen=True, order=True)
class ContextSample:
    timestamp: datetime
    doc_id: str
    sentence: str


@dataclass(frozen=True)
class Occurrence:
    """One observation of a candidate form inside a document."""

    key: str
    surface: str
    cap_class: str
    is_proper_noun: bool
    doc_id: str
    host_domain: str
    timestamp: datetime
    sentence: str
    context_language: str  # language label of the enclosing context


@dataclass
class CandidateStats:
    key: str
    surface_variants: Dict[str, int] = field(default_factory=dict)
    term_freq: int = 0
    lowercase_count: int = 0
    non_ne_count: int = 0
    polish_context_count: int = 0
    doc_ids: Set[str] = field(default_factory=set)
    domains: Set[str] = field(default_factory=set)
    contexts: List[ContextSample] = field(default_factory=list)
    daily_counts: Dict[str, int] = field(default_factory=dict)
    first_seen: Optional[datetime] = None
    last_seen: Optional[datetime] = None

    @property
    def doc_freq(self) -> int:
        return len(self.doc_ids)

    @property
    def unique_domains(self) -> int:
        return len(self.domains)

    def observe(self, occ: Occurrence) -> None:
        self.surface_variants[occ.surface] = self.surface_variants.get(occ.surface, 0) + 1
        self.term_freq += 1
        if occ.cap_class == "lower":
            self.lowercase_count += 1
        if not occ.is_proper_noun:
            self.non_ne_count += 1
        if occ.context_language == "pl":
            self.polish_context_count += 1
        self.doc_ids.add(occ.doc_id)
        self.domains.add(occ.host_domain)
        day = occ.timestamp.strftime("%Y-%m-%d")
        self.daily_counts[day] = self.daily_counts.get(day, 0) + 1
        if self.first_seen is None or occ.timestamp < self.first_seen:
            self.first_seen = occ.timestamp
        if self.last_seen is None or occ.timestamp > self.last_seen:
            self.last_seen = occ.timestamp
        self._add_context(ContextSample(occ.timestamp, occ.doc_id, occ.sentence))

    def _add_context(self, sample: ContextSample) -> None:
        # Keep the earliest witness per distinct sentence, then the N
        # earliest sentences overall; this makes merging commutative.
        for i, existing in enumerate(self.contexts):
            if existing.sentence == sample.sentence:
                if sample < existing:
                    self.contexts[i] = sample
                    self.contexts.sort()
                return
        self.contexts.append(sample)
        self.contexts.sort()
        del self.contexts[CONTEXT_SAMPLE_SIZE:]

    def to_json(self) -> dict:
        fmt = "%Y-%m-%dT%H:%M:%SZ"
        return {
            "key": self.key,
            "surface_variants": dict(sorted(self.surface_variants.items())),
            "term_freq": self.term_freq,
            "lowercase_count": self.lowercase_count,
            "non_ne_count": self.non_ne_count,
            "polish_context_count": self.polish_context_count,
            "doc_ids": sorted(self.doc_ids),
            "domains": sorted(self.domains),
            "contexts": [
                {"timestamp": c.timestamp.strftime(fmt), "doc_id": c.doc_id,
                 "sentence": c.sentence}
                for c in self.contexts
            ],
            "daily_counts": dict(sorted(self.daily_counts.items())),
            "first_seen": self.first_seen.strftime(fmt) if self.first_seen else None,
            "last_seen": self.last_seen.strftime(fmt) if self.last_seen else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CandidateStats":
        def ts(value):
            if value is None:
                return None
            return datetime.strptime(value, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)

        return cls(
            key=data["key"],
            surface_variants=dict(data["surface_variants"]),
            term_freq=data["term_freq"],
            lowercase_count=data["lowercase_count"],
            non_ne_count=data["non_ne_count"],
            polish_context_count=data["polish_context_count"],
            doc_ids=set(data["doc_ids"]),
            domains=set(data["domains"]),
            contexts=[
                ContextSample(ts(c["timestamp"]), c["doc_id"], c["sentence"])
                for c in data["contexts"]
            ],
            daily_counts=dict(data["daily_counts"]),
            first_seen=ts(data["first_seen"]),
            last_seen=ts(data["last_seen"]),
        )

    def merge(self, other: "CandidateStats") -> "CandidateStats":
        if other.key != self.key:
            raise ValueError(f"cannot merge stats for {self.key!r} and {other.key!r}")
        merged = CandidateStats(key=self.key)
        for src in (self, other):
            for surface, n in src.surface_variants.items():
                merged.surface_variants[surface] = merged.surface_variants.get(surface, 0) + n
            merged.term_freq += src.term_freq
            merged.lowercase_count += src.lowercase_count
            merged.non_ne_count += src.non_ne_count
            merged.polish_context_count += src.polish_context_count
            merged.doc_ids |= src.doc_ids
            merged.domains |= src.domains
            for day, n in src.daily_counts.items():
                merged.daily_counts[day] = merged.daily_counts.get(day, 0) + n
            if src.first_seen is not None:
                if merged.first_seen is None or src.first_seen < merged.first_seen:
                    merged.first_seen = src.first_seen
            if src.last_seen is not None:
                if merged.last_seen is None or src.last_seen > merged.last_seen:
                    merged.last_seen = src.last_seen
        by_sentence: Dict[str, ContextSample] = {}
        for sample in self.contexts + other.contexts:
            kept = by_sentence.get(sample.sentence)
            if kept is None or sample < kept:
                by_sentence[sample.sentence] = sample
        merged.contexts = sorted(by_sentence.values())[:CONTEXT_SAMPLE_SIZE]
        return merged

    def sample_sentences(self) -> List[str]:
        return [c.sentence for c in self.contexts]


def extract_candidates(
    doc: AnnotatedDocument, references: Sequence[ReferenceLexicon]
) -> List[Tuple[object, str]]:
    """Tokens absent from every selected reference, with their candidate key
    (lowercased NFC surface).
    """
    if not references:
        raise ValueError("at least one reference lexicon is required")
    out = []
    for token in doc.tokens:
        key = normalize_form(token.surface)
        if any(ref.contains(key) for ref in references):
            continue
        out.append((token, key))
    return out


def occurrences_from(
    doc: AnnotatedDocument,
    candidates: Iterable[Tuple[object, str]],
    sentence_languages: Optional[Dict[int, str]] = None,
) -> List[Occurrence]:
    """Build accumulation records for candidate tokens of one document.

    Context language is the sentence-level label when one was computed,
    otherwise the document-level label.
    """
    document = doc.document
    out = []
    for token, key in candidates:
        if sentence_languages and token.sentence_index in sentence_languages:
            context_language = sentence_languages[token.sentence_index]
        else:
            context_language = document.language
        out.append(
            Occurrence(
                key=key,
                surface=token.surface,
                cap_class=token.cap_class,
                is_proper_noun=bool(token.is_proper_noun),
                doc_id=document.id,
                host_domain=document.host_domain,
                timestamp=document.fetched_at,
                sentence=doc.sentence_text(token.sentence_index),
                context_language=context_language,
            )
        )
    return out


def accumulate(
    store: Dict[str, CandidateStats], occurrences: Iterable[Occurrence]
) -> Dict[str, CandidateStats]:
    """Fold an occurrence stream into per-key stats. Permuting the stream or
    splitting it across partial stores merged later yields identical stats.
    """
    for occ in occurrences:
        stats = store.get(occ.key)
        if stats is None:
            stats = CandidateStats(key=occ.key)
            store[occ.key] = stats
        stats.observe(occ)
    return store


def merge_stores(
    a: Dict[str, CandidateStats], b: Dict[str, CandidateStats]
) -> Dict[str, CandidateStats]:
    out = dict(a)
    for key, stats in b.items():
        out[key] = out[key].merge(stats) if key in out else stats
    return out


_JOIN_RE = re.compile(r"[-‐ ]+")


def variant_normal_form(key: str) -> str:
    """Hyphen-and-space-stripped shape used to consolidate spelling variants."""
    return _JOIN_RE.sub("", normalize_form(key))


@dataclass
class VariantCluster:
    key: str  # canonical member key (highest term_freq, ties lexicographic)
    members: Dict[str, CandidateStats]
    aggregate: CandidateStats

    @property
    def normal_form(self) -> str:
        return variant_normal_form(self.key)


def _cluster_from(members: Dict[str, CandidateStats]) -> VariantCluster:
    canonical = min(members, key=lambda k: (-members[k].term_freq, k))
    aggregate = CandidateStats(key=canonical)
    for stats in members.values():
        aggregate = aggregate.merge(replace_key(stats, canonical))
    return VariantCluster(key=canonical, members=members, aggregate=aggregate)


def replace_key(stats: CandidateStats, key: str) -> CandidateStats:
    clone = CandidateStats(
        key=key,
        surface_variants=dict(stats.surface_variants),
        term_freq=stats.term_freq,
        lowercase_count=stats.lowercase_count,
        non_ne_count=stats.non_ne_count,
        polish_context_count=stats.polish_context_count,
        doc_ids=set(stats.doc_ids),
        domains=set(stats.domains),
        contexts=list(stats.contexts),
        daily_counts=dict(stats.daily_counts),
        first_seen=stats.first_seen,
        last_seen=stats.last_seen,
    )
    return clone


def spaced_variant_occurrences(
    docs: Iterable[AnnotatedDocument], normal_forms: Set[str]
) -> List[Occurrence]:
    """Scan token bigrams whose concatenation matches a known candidate's
    normal form; each hit is an occurrence of the spaced variant.
    """
    from .analyze import cap_class as classify

    out = []
    for doc in docs:
        document = doc.document
        tokens = doc.tokens
        for left, right in zip(tokens, tokens[1:]):
            if left.sentence_index != right.sentence_index:
                continue
            joined = variant_normal_form(left.surface + right.surface)
            if joined not in normal_forms:
                continue
            surface = f"{left.surface} {right.surface}"
            out.append(
                Occurrence(
                    key=normalize_form(surface),
                    surface=surface,
                    cap_class=classify(surface),
                    is_proper_noun=bool(left.is_proper_noun or right.is_proper_noun),
                    doc_id=document.id,
                    host_domain=document.host_domain,
                    timestamp=document.fetched_at,
                    sentence=doc.sentence_text(left.sentence_index),
                    context_language=document.language,
                )
            )
    return out


def consolidate_orthographic_variants(
    stats: Dict[str, CandidateStats],
    bigram_source: Iterable[AnnotatedDocument] = (),
) -> List[VariantCluster]:
    """Cluster forms whose hyphen/space-stripped normalization coincides,
    folding in spaced variants found as token bigrams in the source stream.
    """
    normal_forms = {variant_normal_form(key) for key in stats}
    combined: Dict[str, CandidateStats] = {k: replace_key(v, k) for k, v in stats.items()}
    for occ in spaced_variant_occurrences(bigram_source, normal_forms):
        entry = combined.get(occ.key)
        if entry is None:
            entry = CandidateStats(key=occ.key)
            combined[occ.key] = entry
        entry.observe(occ)

    by_normal: Dict[str, Dict[str, CandidateStats]] = {}
    for key, entry in combined.items():
        by_normal.setdefault(variant_normal_form(key), {})[key] = entry
    clusters = [_cluster_from(members) for members in by_normal.values()]
    clusters.sort(key=lambda c: c.key)
    return clusters


@dataclass
class CandidateGroup:
    base_form: str
    members: List[str]
    aggregate: CandidateStats
    review_status: str = "pending"
    definition: Optional[object] = None
    sentiment: Optional[object] = None
    domain: Optional[object] = None
    lemma_warnings: List[str] = field(default_factory=list)

    @property
    def group_id(self) -> str:
        return self.base_form

    def to_json(self) -> dict:
        return {
            "base_form": self.base_form,
            "members": list(self.members),
            "aggregate": self.aggregate.to_json(),
            "review_status": self.review_status,
            "definition": self.definition.to_json() if self.definition else None,
            "sentiment": (
                {"value": self.sentiment.value, "setup": self.sentiment.setup}
                if self.sentiment else None
            ),
            "domain": (
                {"value": self.domain.value, "setup": self.domain.setup}
                if self.domain else None
            ),
            "lemma_warnings": list(self.lemma_warnings),
        }

    @classmethod
    def from_json(cls, data: dict) -> "CandidateGroup":
        from .llm import Definition, DomainLabel, SentimentLabel

        return cls(
            base_form=data["base_form"],
            members=list(data["members"]),
            aggregate=CandidateStats.from_json(data["aggregate"]),
            review_status=data.get("review_status", "pending"),
            definition=Definition.from_json(data["definition"]) if data.get("definition") else None,
            sentiment=SentimentLabel(**data["sentiment"]) if data.get("sentiment") else None,
            domain=DomainLabel(**data["domain"]) if data.get("domain") else None,
            lemma_warnings=list(data.get("lemma_warnings", [])),
        )


def _majority(values: Sequence[str]) -> str:
    counts: Dict[str, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return min(counts, key=lambda v: (-counts[v], v))


def cluster_lemma(
    cluster: VariantCluster,
    adapter: AnalyzerAdapter,
    mode: str = "context-free",
) -> Tuple[str, Optional[str]]:
    """Lemma of a cluster's canonical form. In-context mode votes over the
    sampled sentences; returns (lemma, warning or None).
    """
    try:
        if mode == "in-context":
            sentences = cluster.aggregate.sample_sentences()
            if sentences:
                votes = [
                    adapter.lemmatize_in_context(cluster.key, sentence)
                    for sentence in sentences
                ]
                return _majority(votes), None
        return adapter.lemmatize(cluster.key), None
    except AdapterError as exc:
        return fallback_lemma(cluster.key), f"lemma fallback for {cluster.key!r}: {exc}"


def group_by_lemma(
    clusters: Sequence[VariantCluster],
    adapter: AnalyzerAdapter,
    mode: str = "context-free",
) -> List[CandidateGroup]:
    """Merge variant clusters sharing a lemma into candidate groups. The base
    form is the most frequent member lemma, ties broken lexicographically.
    """
    if mode not in ("context-free", "in-context"):
        raise ValueError(f"unknown grouping mode: {mode!r}")
    lemma_of: Dict[str, Tuple[str, Optional[str]]] = {}
    for cluster in clusters:
        lemma_of[cluster.key] = cluster_lemma(cluster, adapter, mode)

    by_lemma: Dict[str, List[VariantCluster]] = {}
    for cluster in clusters:
        lemma, _ = lemma_of[cluster.key]
        by_lemma.setdefault(lemma, []).append(cluster)

    groups = []
    for lemma, cluster_list in sorted(by_lemma.items()):
        members: List[str] = []
        aggregate = CandidateStats(key=lemma)
        warnings = []
        for cluster in cluster_list:
            members.extend(sorted(cluster.members))
            aggregate = aggregate.merge(replace_key(cluster.aggregate, lemma))
            warning = lemma_of[cluster.key][1]
            if warning:
                warnings.append(warning)
        groups.append(
            CandidateGroup(
                base_form=lemma,
                members=sorted(members),
                aggregate=aggregate,
                lemma_warnings=warnings,
            )
        )
    return groups
