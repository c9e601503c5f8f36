"""End-to-end pipeline orchestration over the store.

``run_pipeline`` goes documents -> annotation -> candidate extraction ->
accumulation -> variant consolidation -> lemma grouping -> filter chain,
and persists groups, per-group decisions and stage reports.
``rerun_filters`` recomputes the chain from stored group stats without
re-ingesting; LLM verdicts are reused from the cache for unchanged
(group, prompt) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from ..analyze import AnalyzerAdapter, IdentityAdapter, annotate
from ..candidates import (
    CandidateGroup,
    accumulate,
    consolidate_orthographic_variants,
    extract_candidates,
    group_by_lemma,
    occurrences_from,
)
from ..filters import (
    ChainResult,
    FilterConfig,
    FilterDecision,
    FilterError,
    LexiconSet,
    StageReport,
    llm_filter,
    run_chain,
    stage_label,
)
from ..ingest import PollResult, load_feed_list, poll_feeds
from ..llm import FewShotExemplar, neologism_filter_prompt, prompt_hash
from ..metrics import compute_prf
from .store import Store


@dataclass
class PipelineResult:
    groups: List[CandidateGroup]
    survivors: List[CandidateGroup]
    reports: List[StageReport]
    decisions: Dict[str, List[FilterDecision]]


def ingest_feeds(store: Store, feeds_path, fetcher=None) -> PollResult:
    """Poll the feed list and persist any new documents."""
    sources = load_feed_list(feeds_path)
    kwargs = {} if fetcher is None else {"fetch": fetcher}
    result = poll_feeds(sources, seen_ids=store.document_ids(), **kwargs)
    store.add_documents(result.documents)
    return result


def _llm_stage(
    survivors: Sequence[CandidateGroup],
    store: Optional[Store],
    llm_client,
    exemplars: Tuple[Sequence[FewShotExemplar], Sequence[FewShotExemplar]],
) -> List[Tuple[CandidateGroup, FilterDecision]]:
    """LLM verdicts with store-backed caching keyed by (group, prompt hash).
    Undetermined verdicts are not cached, so they are retried on rerun.
    """
    positive, negative = exemplars
    out = []
    for group in survivors:
        contexts = group.aggregate.sample_sentences()
        key = prompt_hash(
            neologism_filter_prompt(group.base_form, group.members, contexts,
                                    positive, negative)
        ) if contexts else None
        cached = store.llm_cache_get(group.group_id, key) if (store and key) else None
        if cached is not None:
            decision = FilterDecision(**cached)
        else:
            decision = llm_filter(group, llm_client, positive, negative, contexts=contexts)
            if store and key and not decision.undetermined:
                store.llm_cache_put(group.group_id, key, "filter_verdict", decision.to_json())
        out.append((group, decision))
    return out


def _apply_chain(
    groups: Sequence[CandidateGroup],
    chain: Sequence[str],
    filter_config: FilterConfig,
    lexicons: LexiconSet,
    gold: Optional[Set[str]],
    store: Optional[Store],
    llm_client,
    exemplars,
) -> ChainResult:
    pure_chain = [f for f in chain if f != "llm"]
    result = run_chain(groups, pure_chain, filter_config, lexicons, gold=gold)
    if "llm" in chain:
        if llm_client is None:
            raise FilterError("the chain includes the llm stage but no client is configured")
        staged = _llm_stage(result.survivors, store, llm_client, exemplars)
        survivors = []
        for group, decision in staged:
            result.decisions[group.group_id].append(decision)
            if decision.passed:
                survivors.append(group)
        report = StageReport(
            stage_label=stage_label("llm", filter_config), remaining=len(survivors)
        )
        if gold is not None:
            prf = compute_prf({g.base_form for g in survivors}, gold)
            report.gold_matches = prf.tp
            report.precision = prf.precision
            report.recall = prf.recall
            report.f1 = prf.f1
        result.reports.append(report)
        result.survivors = survivors
    return result


def run_pipeline(
    store: Store,
    lexicons: LexiconSet,
    filter_config: FilterConfig,
    chain: Sequence[str],
    adapter: Optional[AnalyzerAdapter] = None,
    grouping_mode: str = "context-free",
    gold: Optional[Set[str]] = None,
    llm_client=None,
    exemplars=None,
) -> PipelineResult:
    """Analyze every stored document and persist the filtered result."""
    adapter = adapter or IdentityAdapter()
    dictionary = lexicons.require_dictionary()
    documents = store.iter_documents()

    annotated = [annotate(doc, adapter) for doc in documents]
    stats: dict = {}
    for doc in annotated:
        found = extract_candidates(doc, [dictionary])
        accumulate(stats, occurrences_from(doc, found))

    clusters = consolidate_orthographic_variants(stats, annotated)
    groups = group_by_lemma(clusters, adapter, mode=grouping_mode)

    result = _apply_chain(groups, chain, filter_config, lexicons, gold,
                          store, llm_client, exemplars)
    store.replace_groups(groups, [g.group_id for g in result.survivors], result.decisions)
    store.save_stage_reports(result.reports)
    store.save_filter_config(filter_config, chain)
    return PipelineResult(
        groups=groups,
        survivors=result.survivors,
        reports=result.reports,
        decisions=result.decisions,
    )


def rerun_filters(
    store: Store,
    filter_config: FilterConfig,
    chain: Optional[Sequence[str]] = None,
    lexicons: Optional[LexiconSet] = None,
    gold: Optional[Set[str]] = None,
    llm_client=None,
    exemplars=None,
) -> List[StageReport]:
    """Recompute the chain from stored candidate stats. The new config is
    validated before any state changes; on failure the previous
    configuration and reports stay active.
    """
    if lexicons is None:
        raise FilterError("rerun requires loaded lexicons")
    if chain is None:
        saved = store.load_filter_config()
        if saved is None:
            raise FilterError("no stored chain; run the pipeline first")
        chain = saved[1]
        if filter_config.llm_filter_enabled and "llm" not in chain:
            chain = list(chain) + ["llm"]
        elif not filter_config.llm_filter_enabled:
            chain = [f for f in chain if f != "llm"]

    groups = [group for group, _, _ in store.all_groups()]
    result = _apply_chain(groups, chain, filter_config, lexicons, gold,
                          store, llm_client, exemplars)
    store.replace_groups(groups, [g.group_id for g in result.survivors], result.decisions)
    store.save_stage_reports(result.reports)
    store.save_filter_config(filter_config, chain)
    return result.reports
