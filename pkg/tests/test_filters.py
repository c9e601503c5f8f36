import itertools
import random
from datetime import datetime, timezone

import pytest

from neolog.candidates import CandidateGroup, CandidateStats, ContextSample
from neolog.filters import (
    ChainResult,
    FilterConfig,
    FilterError,
    LexiconSet,
    apply_filter,
    default_chain,
    has_triple_repeat,
    llm_filter,
    run_chain,
    stage_label,
)
from neolog.lexicon import ReferenceLexicon
from neolog.llm import FewShotExemplar, StaticClient

T0 = datetime(2024, 5, 1, tzinfo=timezone.utc)


def make_group(base_form, doc_freq=10, term_freq=None, lowercase=None, non_ne=None,
               polish=None, domains=2, contexts=3):
    term_freq = term_freq if term_freq is not None else max(doc_freq, 10)
    stats = CandidateStats(
        key=base_form,
        surface_variants={base_form: term_freq},
        term_freq=term_freq,
        lowercase_count=lowercase if lowercase is not None else term_freq,
        non_ne_count=non_ne if non_ne is not None else term_freq,
        polish_context_count=polish if polish is not None else term_freq,
        doc_ids={f"{base_form}-d{i}" for i in range(doc_freq)},
        domains={f"s{i}.pl" for i in range(domains)},
        contexts=[
            ContextSample(T0, f"{base_form}-d{i}", f"Zdanie z {base_form} numer {i}.")
            for i in range(contexts)
        ],
        first_seen=T0,
        last_seen=T0,
    )
    return CandidateGroup(base_form=base_form, members=[base_form], aggregate=stats)


def make_lexicons(dictionary=("kot", "okno", "żółw", "dom"), english=("the", "crypto"),
                  references=None):
    refs = {}
    for name, words in (references or {}).items():
        refs[name] = ReferenceLexicon(name, "frequency-list", {w: 10 for w in words})
    return LexiconSet(
        dictionary=ReferenceLexicon("sjp", "dictionary", {w: 1 for w in dictionary}),
        english=ReferenceLexicon("english", "dictionary", {w: 1 for w in english}),
        references=refs,
    )


CONFIG = FilterConfig()
LEX = make_lexicons()


class TestTripleRepeat:
    def test_triple(self):
        assert has_triple_repeat("aaab")

    def test_pairs_only(self):
        assert not has_triple_repeat("aabb")

    def test_empty(self):
        assert not has_triple_repeat("")


class TestApplyFilter:
    def test_too_short(self):
        decision = apply_filter(make_group("ab"), "min_length", CONFIG, LEX)
        assert not decision.passed
        assert "3" in decision.reason

    def test_digits(self):
        decision = apply_filter(make_group("covid19"), "digits", CONFIG, LEX)
        assert not decision.passed
        assert decision.evidence == "19"

    def test_triple_repeat_spelling(self):
        decision = apply_filter(make_group("superrr"), "spelling", CONFIG, LEX)
        assert not decision.passed
        assert "triple" in decision.reason

    def test_diacritic_variant_spelling(self):
        decision = apply_filter(make_group("zolw"), "spelling", CONFIG, LEX)
        assert not decision.passed
        assert "diacritic" in decision.reason

    def test_adjacent_swap_spelling(self):
        decision = apply_filter(make_group("onko"), "spelling", CONFIG, LEX)
        assert not decision.passed
        assert "swap" in decision.reason

    def test_edit_distance_near_word_fails(self):
        decision = apply_filter(make_group("kotka"), "edit_distance", CONFIG, LEX)
        assert not decision.passed  # distance to "kot" is 0.4 <= 0.5
        assert "kot" in decision.evidence

    def test_edit_distance_alien_word_passes(self):
        decision = apply_filter(make_group("sepulka"), "edit_distance", CONFIG, LEX)
        assert decision.passed

    def test_doc_freq_threshold(self):
        assert not apply_filter(make_group("słowo", doc_freq=4), "doc_freq", CONFIG, LEX).passed
        assert apply_filter(make_group("słowo", doc_freq=5), "doc_freq", CONFIG, LEX).passed

    def test_lowercase_threshold(self):
        group = make_group("słowo", lowercase=2)
        assert not apply_filter(group, "lowercase", CONFIG, LEX).passed

    def test_non_ne_threshold(self):
        group = make_group("słowo", non_ne=1)
        assert not apply_filter(group, "non_ne", CONFIG, LEX).passed

    def test_english_word_needs_polish_contexts(self):
        group = make_group("crypto", polish=2)
        assert not apply_filter(group, "english_context", CONFIG, LEX).passed
        group = make_group("crypto", polish=7)
        assert apply_filter(group, "english_context", CONFIG, LEX).passed

    def test_non_english_word_ignores_polish_count(self):
        group = make_group("sepulka", polish=0)
        assert apply_filter(group, "english_context", CONFIG, LEX).passed

    def test_reference_corpus_exclusion(self):
        lex = make_lexicons(references={"nkjp": {"sepulka"}})
        config = FilterConfig(enabled_references=("nkjp",))
        assert not apply_filter(make_group("sepulka"), "not_in:nkjp", config, lex).passed
        assert apply_filter(make_group("nowe"), "not_in:nkjp", config, lex).passed
        assert not apply_filter(make_group("sepulka"), "reference_corpora", config, lex).passed

    def test_unique_domains(self):
        config = FilterConfig(min_unique_domains=3)
        assert not apply_filter(make_group("słowo", domains=2), "unique_domains", config, LEX).passed

    def test_compound_never_rejects(self):
        decision = apply_filter(make_group("kotdom"), "compound", CONFIG, LEX)
        assert decision.passed
        assert decision.evidence == "compound"
        assert apply_filter(make_group("sepulka"), "compound", CONFIG, LEX).passed

    def test_unknown_filter(self):
        with pytest.raises(FilterError):
            apply_filter(make_group("x"), "bogus", CONFIG, LEX)

    def test_missing_lexicon(self):
        with pytest.raises(FilterError):
            apply_filter(make_group("x"), "not_in:void", CONFIG, LEX)

    def test_failed_decisions_have_reasons(self):
        for group, fid in [
            (make_group("ab"), "min_length"),
            (make_group("covid19"), "digits"),
            (make_group("superrr"), "spelling"),
            (make_group("słowo", doc_freq=1), "doc_freq"),
        ]:
            decision = apply_filter(group, fid, CONFIG, LEX)
            assert not decision.passed and decision.reason


class TestConfigValidation:
    def test_invalid_min_len(self):
        with pytest.raises(FilterError):
            FilterConfig(min_len=0)

    def test_max_below_min(self):
        with pytest.raises(FilterError):
            FilterConfig(min_len=5, max_len=4)

    def test_edit_distance_range(self):
        with pytest.raises(FilterError):
            FilterConfig(min_norm_edit_distance=1.5)


class TestRunChain:
    def groups_for_chain(self):
        return [
            make_group("ab"),            # fails min_length
            make_group("xy"),            # fails min_length
            make_group("covid19"),       # fails digits
            make_group("sepulka"),
            make_group("blurwa"),
        ]

    def test_remaining_counts(self):
        result = run_chain(self.groups_for_chain(), ["min_length", "digits"], CONFIG, LEX)
        assert [r.remaining for r in result.reports] == [5, 3, 2]

    def test_empty_chain_is_identity(self):
        groups = self.groups_for_chain()
        result = run_chain(groups, [], CONFIG, LEX)
        assert len(result.reports) == 1
        assert result.reports[0].stage_label == "No filter"
        assert result.survivors == groups

    def test_gold_metrics(self):
        groups = [make_group("grupax"), make_group("grupay")]
        result = run_chain(groups, ["min_length"], CONFIG, LEX, gold={"grupax"})
        final = result.reports[-1]
        assert final.precision == 0.5
        assert final.recall == 1.0

    def test_monotone_remaining(self):
        result = run_chain(self.groups_for_chain(),
                           default_chain(CONFIG), CONFIG, LEX)
        remaining = [r.remaining for r in result.reports]
        assert all(a >= b for a, b in zip(remaining, remaining[1:]))

    def test_rejected_group_has_exactly_one_rejection(self):
        result = run_chain(self.groups_for_chain(), default_chain(CONFIG), CONFIG, LEX)
        surviving_ids = {g.group_id for g in result.survivors}
        for group in self.groups_for_chain():
            rejections = [d for d in result.decisions[group.group_id] if not d.passed]
            if group.group_id in surviving_ids:
                assert rejections == []
            else:
                assert len(rejections) == 1
                # the rejection is the last decision recorded for the group
                assert result.decisions[group.group_id][-1] == rejections[0]

    def random_group(self, rng, i):
        base = rng.choice(
            ["ab", "covid19", "superrr", "zolw", "onko", "sepulka", "blurwa",
             "crypto", "xenoplazma", "kotka", "aspekt"]
        )
        return make_group(
            f"{base}",
            doc_freq=rng.randint(1, 12),
            lowercase=rng.randint(0, 12),
            non_ne=rng.randint(0, 12),
            polish=rng.randint(0, 12),
            domains=rng.randint(1, 4),
        )

    def test_pure_filters_permutation_invariant(self):
        rng = random.Random(5)
        chain = ["min_length", "max_length", "digits", "doc_freq", "lowercase",
                 "non_ne", "edit_distance", "spelling", "english_context"]
        for trial in range(10):
            seen = {}
            groups = []
            for i in range(rng.randint(3, 10)):
                g = self.random_group(rng, i)
                if g.base_form not in seen:
                    seen[g.base_form] = g
                    groups.append(g)
            baseline = None
            for _ in range(6):
                order = chain[:]
                rng.shuffle(order)
                result = run_chain(groups, order, CONFIG, LEX)
                survivors = {g.base_form for g in result.survivors}
                if baseline is None:
                    baseline = survivors
                else:
                    assert survivors == baseline

    def test_threshold_monotonicity(self):
        rng = random.Random(17)
        groups = [self.random_group(rng, i) for i in range(30)]
        previous = None
        for threshold in (1, 3, 5, 8, 12):
            config = FilterConfig(min_doc_freq=threshold)
            result = run_chain(groups, ["doc_freq"], config, LEX)
            survivors = {id(g) for g in result.survivors}
            if previous is not None:
                assert survivors <= previous
            previous = survivors


POSITIVE = [FewShotExemplar(f"nowe{i}", [f"Zdanie z nowe{i}."]) for i in range(3)]
NEGATIVE = [FewShotExemplar(f"stare{i}", [f"Zdanie ze stare{i}."]) for i in range(3)]


class TestLlmFilter:
    def test_tak_passes(self):
        decision = llm_filter(make_group("sepulka"), StaticClient("Uzasadnienie.\nNeologizm: tak"),
                              POSITIVE, NEGATIVE)
        assert decision.passed and not decision.undetermined

    def test_nie_fails_case_insensitive(self):
        decision = llm_filter(make_group("sepulka"), StaticClient("Neologizm: NIE"),
                              POSITIVE, NEGATIVE)
        assert not decision.passed

    def test_prose_without_marker_is_undetermined(self):
        client = StaticClient("długa odpowiedź bez wymaganego formatu")
        decision = llm_filter(make_group("sepulka"), client, POSITIVE, NEGATIVE)
        assert decision.passed and decision.undetermined
        assert client.calls == 3  # initial attempt + 2 retries

    def test_group_without_contexts_rejected(self):
        group = make_group("sepulka", contexts=0)
        with pytest.raises(FilterError):
            llm_filter(group, StaticClient("Neologizm: tak"), POSITIVE, NEGATIVE)

    def test_llm_stage_runs_last(self):
        with pytest.raises(FilterError):
            run_chain([make_group("x")], ["llm", "digits"], CONFIG, LEX,
                      llm_client=StaticClient("Neologizm: tak"),
                      exemplars=(POSITIVE, NEGATIVE))

    def test_llm_stage_in_chain(self):
        groups = [make_group("sepulka"), make_group("blurwa")]
        responses = {
            "sepulka": "Neologizm: tak",
            "blurwa": "Neologizm: nie",
        }

        class WordJudge:
            model_name = "wj"

            def complete(self, prompt):
                for word, resp in responses.items():
                    if f"[Słowo]\n{word}" in prompt:
                        return resp
                raise AssertionError("unexpected prompt")

        result = run_chain(groups, ["llm"], CONFIG, LEX,
                           llm_client=WordJudge(), exemplars=(POSITIVE, NEGATIVE))
        assert [g.base_form for g in result.survivors] == ["sepulka"]
        assert result.reports[-1].stage_label == "+ LLM filtering"


def test_default_chain_layout():
    config = FilterConfig(enabled_references=("nkjp", "kwjp"), llm_filter_enabled=True)
    chain = default_chain(config)
    assert chain[:3] == ["min_length", "max_length", "digits"]
    assert "not_in:nkjp" in chain and "not_in:kwjp" in chain
    assert chain[-1] == "llm"
    assert stage_label("not_in:nkjp", config) == "+ Not in NKJP"
