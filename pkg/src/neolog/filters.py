"""The candidate filter catalog and the incremental chain runner.

Every rule filter is a pure predicate over a group's aggregate stats plus
the loaded lexicons, so the surviving SET is invariant under filter order;
per-stage survivor counts depend on the order and are reported stage by
stage. The LLM filter is the only stateful one and always runs last.
"""

from __future__ import annotations

import unicodedata
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .candidates import CandidateGroup
from .lexicon import (
    DiacriticFoldTable,
    EditDistanceIndex,
    ReferenceLexicon,
    is_adjacent_swap_variant,
    is_diacritic_variant,
)
from .llm import FewShotExemplar, LlmError, neologism_filter_prompt, parse_filter_verdict
from .metrics import compute_prf


class FilterError(Exception):
    pass


@dataclass(frozen=True)
class FilterConfig:
    min_len: int = 3
    max_len: int = 20
    min_doc_freq: int = 5
    min_lowercase: int = 5
    min_non_ne: int = 5
    min_polish_contexts: int = 5
    min_norm_edit_distance: float = 0.5
    min_unique_domains: int = 1
    enabled_references: Tuple[str, ...] = ()
    llm_filter_enabled: bool = False

    def __post_init__(self):
        if self.min_len < 1:
            raise FilterError(f"min_len must be >= 1, got {self.min_len}")
        if self.max_len < self.min_len:
            raise FilterError("max_len must be >= min_len")
        for name in ("min_doc_freq", "min_lowercase", "min_non_ne",
                     "min_polish_contexts", "min_unique_domains"):
            if getattr(self, name) < 0:
                raise FilterError(f"{name} must be non-negative")
        if not 0 <= self.min_norm_edit_distance <= 1:
            raise FilterError("min_norm_edit_distance must be in [0, 1]")


@dataclass(frozen=True)
class FilterDecision:
    filter_id: str
    passed: bool
    reason: str
    evidence: Optional[str] = None
    undetermined: bool = False

    def to_json(self) -> dict:
        return {
            "filter_id": self.filter_id,
            "passed": self.passed,
            "reason": self.reason,
            "evidence": self.evidence,
            "undetermined": self.undetermined,
        }


@dataclass
class StageReport:
    stage_label: str
    remaining: int
    gold_matches: Optional[int] = None
    precision: Optional[float] = None
    recall: Optional[float] = None
    f1: Optional[float] = None

    def to_json(self) -> dict:
        return {
            "stage_label": self.stage_label,
            "remaining": self.remaining,
            "gold_matches": self.gold_matches,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }

    @classmethod
    def from_json(cls, data: dict) -> "StageReport":
        return cls(**data)


@dataclass
class LexiconSet:
    """The lexicons the filters consult, by role."""

    dictionary: Optional[ReferenceLexicon] = None
    english: Optional[ReferenceLexicon] = None
    references: Dict[str, ReferenceLexicon] = field(default_factory=dict)
    fold: DiacriticFoldTable = field(default_factory=DiacriticFoldTable)
    _index: Optional[EditDistanceIndex] = None

    def dictionary_index(self) -> EditDistanceIndex:
        if self.dictionary is None:
            raise FilterError("a Polish dictionary lexicon is required")
        if self._index is None:
            self._index = EditDistanceIndex(self.dictionary)
        return self._index

    def require_dictionary(self) -> ReferenceLexicon:
        if self.dictionary is None:
            raise FilterError("a Polish dictionary lexicon is required")
        return self.dictionary

    def reference(self, name: str) -> ReferenceLexicon:
        if name not in self.references:
            raise FilterError(f"reference lexicon {name!r} is not loaded")
        return self.references[name]


def has_triple_repeat(word: str) -> bool:
    """True iff some character occurs three or more times in a row."""
    run = 1
    for prev, cur in zip(word, word[1:]):
        run = run + 1 if cur == prev else 1
        if run >= 3:
            return True
    return False


_ALLOWED_NONLETTER = {"-", "'", "’", "‐"}


def _passed(filter_id: str, reason: str = "", evidence: Optional[str] = None) -> FilterDecision:
    return FilterDecision(filter_id=filter_id, passed=True, reason=reason, evidence=evidence)


def _failed(filter_id: str, reason: str, evidence: Optional[str] = None) -> FilterDecision:
    return FilterDecision(filter_id=filter_id, passed=False, reason=reason, evidence=evidence)


def splits_into_dictionary_words(word: str, dictionary: ReferenceLexicon) -> bool:
    for i in range(1, len(word)):
        if dictionary.contains(word[:i]) and dictionary.contains(word[i:]):
            return True
    return False


def apply_filter(
    group: CandidateGroup,
    filter_id: str,
    config: FilterConfig,
    lexicons: LexiconSet,
    fold: Optional[DiacriticFoldTable] = None,
) -> FilterDecision:
    """Evaluate one pure filter against a group. Raises FilterError for an
    unknown filter id or a missing required lexicon.
    """
    fold = fold or lexicons.fold
    word = group.base_form
    stats = group.aggregate

    if filter_id == "min_length":
        if len(word) < config.min_len:
            return _failed(filter_id, f"shorter than {config.min_len} characters",
                           evidence=f"len={len(word)}")
        return _passed(filter_id)

    if filter_id == "max_length":
        if len(word) > config.max_len:
            return _failed(filter_id, f"longer than {config.max_len} characters",
                           evidence=f"len={len(word)}")
        return _passed(filter_id)

    if filter_id == "digits":
        digits = [c for c in word if unicodedata.category(c) == "Nd"]
        if digits:
            return _failed(filter_id, "contains digits", evidence="".join(digits))
        return _passed(filter_id)

    if filter_id == "invalid_chars":
        bad = [c for c in word if not c.isalpha() and c not in _ALLOWED_NONLETTER]
        if bad:
            return _failed(filter_id, "contains characters other than letters, "
                           "hyphen or apostrophe", evidence="".join(sorted(set(bad))))
        return _passed(filter_id)

    if filter_id == "doc_freq":
        if stats.doc_freq < config.min_doc_freq:
            return _failed(filter_id, f"document frequency below {config.min_doc_freq}",
                           evidence=f"doc_freq={stats.doc_freq}")
        return _passed(filter_id)

    if filter_id == "lowercase":
        if stats.lowercase_count < config.min_lowercase:
            return _failed(filter_id, f"fewer than {config.min_lowercase} lowercase occurrences",
                           evidence=f"lowercase_count={stats.lowercase_count}")
        return _passed(filter_id)

    if filter_id == "non_ne":
        if stats.non_ne_count < config.min_non_ne:
            return _failed(filter_id, f"fewer than {config.min_non_ne} non-proper-noun occurrences",
                           evidence=f"non_ne_count={stats.non_ne_count}")
        return _passed(filter_id)

    if filter_id == "edit_distance":
        index = lexicons.dictionary_index()
        distance, nearest = index.min_normalized_distance(word)
        if distance <= config.min_norm_edit_distance:
            return _failed(
                filter_id,
                f"normalized edit distance to a dictionary word is not above "
                f"{config.min_norm_edit_distance}",
                evidence=f"nearest={nearest!r} distance={distance:.3f}",
            )
        return _passed(filter_id, evidence=f"nearest={nearest!r} distance={distance:.3f}")

    if filter_id == "spelling":
        dictionary = lexicons.require_dictionary()
        if is_diacritic_variant(dictionary, fold, word):
            return _failed(filter_id, "diacritic variant of a dictionary word",
                           evidence=fold.fold(word))
        if is_adjacent_swap_variant(dictionary, word):
            return _failed(filter_id, "adjacent-swap variant of a dictionary word")
        if has_triple_repeat(word):
            return _failed(filter_id, "contains a triple-repeated character")
        return _passed(filter_id)

    if filter_id == "english_context":
        english = lexicons.english
        if english is None:
            raise FilterError("english_context filter requires an English lexicon")
        if english.contains(word) and stats.polish_context_count < config.min_polish_contexts:
            return _failed(
                filter_id,
                f"English dictionary word with fewer than "
                f"{config.min_polish_contexts} Polish contexts",
                evidence=f"polish_context_count={stats.polish_context_count}",
            )
        return _passed(filter_id)

    if filter_id == "reference_corpora":
        for name in config.enabled_references:
            if lexicons.reference(name).contains(word):
                return _failed(filter_id, f"present in reference corpus {name}", evidence=name)
        return _passed(filter_id)

    if filter_id.startswith("not_in:"):
        name = filter_id.split(":", 1)[1]
        if lexicons.reference(name).contains(word):
            return _failed(filter_id, f"present in reference corpus {name}", evidence=name)
        return _passed(filter_id)

    if filter_id == "unique_domains":
        if stats.unique_domains < config.min_unique_domains:
            return _failed(filter_id, f"seen on fewer than {config.min_unique_domains} domains",
                           evidence=f"unique_domains={stats.unique_domains}")
        return _passed(filter_id)

    if filter_id == "compound":
        # Annotation only: flags forms that split into two dictionary words
        # but never rejects.
        dictionary = lexicons.require_dictionary()
        if splits_into_dictionary_words(word, dictionary):
            return _passed(filter_id, reason="splits into two dictionary words",
                           evidence="compound")
        return _passed(filter_id)

    raise FilterError(f"unknown filter id: {filter_id!r}")


PURE_FILTERS = (
    "min_length", "max_length", "digits", "invalid_chars", "doc_freq",
    "lowercase", "non_ne", "edit_distance", "spelling", "english_context",
    "reference_corpora", "unique_domains", "compound",
)


def default_chain(config: FilterConfig) -> List[str]:
    """The default incremental order: structural constraints, frequency and
    context thresholds, spelling checks, then one stage per enabled
    reference corpus (and the LLM stage when enabled).
    """
    chain = [
        "min_length", "max_length", "digits", "doc_freq", "lowercase",
        "non_ne", "edit_distance", "spelling", "english_context",
    ]
    chain.extend(f"not_in:{name}" for name in config.enabled_references)
    if config.llm_filter_enabled:
        chain.append("llm")
    return chain


def stage_label(filter_id: str, config: FilterConfig) -> str:
    labels = {
        "min_length": "+ Min Token Len",
        "max_length": "+ Max Token Len",
        "digits": "+ No Digits",
        "invalid_chars": "+ Valid Chars",
        "doc_freq": f"+ Freq ≥ {config.min_doc_freq}",
        "lowercase": f"+ Non-Uppercase Freq ≥ {config.min_lowercase}",
        "non_ne": f"+ Non-NE Freq ≥ {config.min_non_ne}",
        "edit_distance": "+ Min Edit Distance",
        "spelling": "+ Spelling",
        "english_context": f"+ Non-Eng Freq ≥ {config.min_polish_contexts}",
        "reference_corpora": "+ Not in Reference Corpora",
        "unique_domains": f"+ Unique Domains ≥ {config.min_unique_domains}",
        "compound": "+ Compound Flag",
        "llm": "+ LLM filtering",
    }
    if filter_id in labels:
        return labels[filter_id]
    if filter_id.startswith("not_in:"):
        return f"+ Not in {filter_id.split(':', 1)[1].upper()}"
    return f"+ {filter_id}"


@dataclass
class ChainResult:
    survivors: List[CandidateGroup]
    reports: List[StageReport]
    decisions: Dict[str, List[FilterDecision]]  # group id -> decisions in chain order

    def rejection(self, group_id: str) -> Optional[FilterDecision]:
        for decision in self.decisions.get(group_id, []):
            if not decision.passed:
                return decision
        return None


def _stage_report(
    label: str, survivors: Sequence[CandidateGroup], gold: Optional[Set[str]]
) -> StageReport:
    report = StageReport(stage_label=label, remaining=len(survivors))
    if gold is not None:
        prf = compute_prf({g.base_form for g in survivors}, gold)
        report.gold_matches = prf.tp
        report.precision = prf.precision
        report.recall = prf.recall
        report.f1 = prf.f1
    return report


def llm_filter(
    group: CandidateGroup,
    client,
    positive: Sequence[FewShotExemplar],
    negative: Sequence[FewShotExemplar],
    contexts: Optional[Sequence[str]] = None,
    parse_retries: int = 2,
) -> FilterDecision:
    """Few-shot LLM verdict on one group. Transport failures or an
    unparseable response after retries yield an undetermined decision: the
    group is retained and flagged.
    """
    contexts = list(contexts if contexts is not None else group.aggregate.sample_sentences())
    if not contexts:
        raise FilterError(f"group {group.base_form!r} has no sampled contexts")
    prompt = neologism_filter_prompt(
        word=group.base_form,
        forms=group.members,
        contexts=contexts,
        positive=positive,
        negative=negative,
    )
    last_error = None
    for _ in range(parse_retries + 1):
        try:
            text = client.complete(prompt)
            verdict = parse_filter_verdict(text)
        except LlmError as exc:
            last_error = exc
            continue
        if verdict:
            return _passed("llm", reason="judged a neologism")
        return _failed("llm", reason="judged not a neologism")
    return FilterDecision(
        filter_id="llm",
        passed=True,
        reason=f"undetermined after retries: {last_error}",
        undetermined=True,
    )


def run_chain(
    groups: Sequence[CandidateGroup],
    order: Sequence[str],
    config: FilterConfig,
    lexicons: LexiconSet,
    gold: Optional[Set[str]] = None,
    llm_client=None,
    exemplars: Optional[Tuple[Sequence[FewShotExemplar], Sequence[FewShotExemplar]]] = None,
    llm_parallelism: int = 4,
) -> ChainResult:
    """Apply filters cumulatively in the given order, recording a survivor
    report after every stage (with precision/recall/F1 when a gold set is
    given). An empty order is the identity: only the "No filter" stage.
    """
    order = list(order)
    if "llm" in order and order.index("llm") != len(order) - 1:
        raise FilterError("the llm filter can only be the final stage")

    survivors = list(groups)
    decisions: Dict[str, List[FilterDecision]] = {g.group_id: [] for g in groups}
    reports = [_stage_report("No filter", survivors, gold)]

    for filter_id in order:
        if filter_id == "llm":
            if llm_client is None or exemplars is None:
                raise FilterError("llm stage requires a client and exemplars")
            positive, negative = exemplars
            with ThreadPoolExecutor(max_workers=max(1, llm_parallelism)) as pool:
                stage = list(pool.map(
                    lambda g: llm_filter(g, llm_client, positive, negative), survivors
                ))
        else:
            stage = [apply_filter(g, filter_id, config, lexicons) for g in survivors]
        next_survivors = []
        for group, decision in zip(survivors, stage):
            decisions[group.group_id].append(decision)
            if decision.passed:
                next_survivors.append(group)
        survivors = next_survivors
        reports.append(_stage_report(stage_label(filter_id, config), survivors, gold))
    return ChainResult(survivors=survivors, reports=reports, decisions=decisions)
