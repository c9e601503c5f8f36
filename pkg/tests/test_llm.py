import math
import re

import pytest

from neolog.llm import (
    Definition,
    LlmConfig,
    LlmError,
    LlmParseError,
    ScriptedClient,
    StaticClient,
    categorize,
    generate_definition,
    judge_pairwise,
    judge_pointwise,
    parse_filter_verdict,
    prompt_hash,
    run_definition_evaluation,
)
from neolog.llm.prompts import definition_prompt, pairwise_judge_prompt


class TestConfig:
    def test_defaults(self):
        config = LlmConfig()
        assert config.temperature == 0.6
        assert config.top_p == 0.95

    def test_bounds(self):
        with pytest.raises(ValueError):
            LlmConfig(temperature=0.0)
        with pytest.raises(ValueError):
            LlmConfig(top_p=1.5)
        with pytest.raises(ValueError):
            LlmConfig(retries=-1)


class TestGenerateDefinition:
    contexts = [f"Przykładowe zdanie numer {i} o słowie." for i in range(1, 8)]

    def test_zero_shot_has_no_example_block(self):
        prompt = definition_prompt("sepulka", self.contexts, shots=0)
        assert "[Przykład" not in prompt
        assert "przykładach" not in prompt

    def test_five_shot_embeds_first_five_in_order(self):
        prompt = definition_prompt("sepulka", self.contexts, shots=5)
        positions = [prompt.find(c) for c in self.contexts[:5]]
        assert all(p != -1 for p in positions)
        assert positions == sorted(positions)
        assert self.contexts[5] not in prompt
        assert "[Przykład 5]" in prompt and "[Przykład 6]" not in prompt

    def test_echo_client_stored_verbatim(self):
        client = StaticClient("mała maszyna do sepulkowania")
        d = generate_definition("sepulka", self.contexts, 3, client)
        assert d.text == "mała maszyna do sepulkowania"
        assert d.shots == 3
        assert list(d.examples_used) == self.contexts[:3]

    def test_too_few_contexts(self):
        with pytest.raises(ValueError):
            generate_definition("x", ["jedno"], 3, StaticClient("d"))

    def test_empty_response_is_error(self):
        with pytest.raises(LlmError):
            generate_definition("x", self.contexts, 0, StaticClient("   "))

    def test_invalid_shots(self):
        with pytest.raises(ValueError):
            generate_definition("x", self.contexts, 4, StaticClient("d"))
        with pytest.raises(ValueError):
            Definition("x", "d", 2, ("a", "b"), "m", __import__("datetime").datetime.now())

    def test_prompt_reproducible(self):
        a = definition_prompt("slowo", self.contexts, 3)
        b = definition_prompt("slowo", self.contexts, 3)
        assert a.encode() == b.encode()


class TestCategorize:
    contexts = [f"Zdanie {i}." for i in range(6)]

    def test_polish_sentiment_name_maps(self):
        label = categorize("x", "examples", self.contexts, None, "sentiment",
                           StaticClient("NEGATYWNY"))
        assert label.value == "negative"

    def test_off_list_answer_is_parse_error_with_raw(self):
        with pytest.raises(LlmParseError) as err:
            categorize("x", "examples", self.contexts, None, "sentiment",
                       StaticClient("chyba fajne slowo"))
        assert "chyba fajne slowo" in str(err.value)

    def test_both_without_definition(self):
        with pytest.raises(ValueError):
            categorize("x", "both", self.contexts, None, "sentiment", StaticClient("NEUTRALNY"))

    def test_examples_needs_five_contexts(self):
        with pytest.raises(ValueError):
            categorize("x", "examples", ["a"], None, "sentiment", StaticClient("NEUTRALNY"))

    def test_domain_label(self):
        label = categorize(
            "x", "examples", self.contexts, None, "domain",
            StaticClient("Moim zdaniem to Technology and Science."),
        )
        assert label.value == "Technology and Science"

    def test_reasoning_prefix_last_match_wins(self):
        text = "Słowo bywa pozytywne w ironii, ale ostatecznie: NEGATYWNY"
        label = categorize("x", "examples", self.contexts, None, "sentiment",
                           StaticClient(text))
        assert label.value == "negative"

    def test_parse_retries_then_success(self):
        client = StaticClient(["bez kategorii", "nadal nic", "NEUTRALNE"])
        label = categorize("x", "examples", self.contexts, None, "sentiment", client)
        assert label.value == "neutral"
        assert client.calls == 3

    def test_every_closed_set_label_parses(self):
        from neolog.llm import DOMAIN_LABELS, parse_domain, parse_sentiment

        for answer, expected in [
            ("POZYTYWNY", "positive"), ("pozytywne", "positive"), ("positive", "positive"),
            ("NEUTRALNY", "neutral"), ("NEUTRALNE", "neutral"), ("neutral", "neutral"),
            ("NEGATYWNY", "negative"), ("negatywne", "negative"), ("negative", "negative"),
        ]:
            assert parse_sentiment(answer) == expected
        for label in DOMAIN_LABELS:
            assert parse_domain(label) == label
            assert parse_domain(label.upper()) == label


class TestJudgePointwise:
    contexts = [f"Zdanie {i}." for i in range(5)]

    def judge(self, response):
        return judge_pointwise("x", "definicja referencyjna", "definicja oceniana",
                               self.contexts, StaticClient(response))

    def test_correct(self):
        assert self.judge("CORRECT").value == "CORRECT"

    def test_lenient_casing_and_punctuation(self):
        assert self.judge("incorrect.").value == "INCORRECT"

    def test_off_list(self):
        with pytest.raises(LlmParseError):
            self.judge("MAYBE")

    def test_empty_definition_rejected(self):
        with pytest.raises(ValueError):
            judge_pointwise("x", "", "def", self.contexts, StaticClient("CORRECT"))


class TestJudgePairwise:
    contexts = [f"Zdanie {i}." for i in range(5)]

    def test_swap_rule(self):
        # Exercise both presentation orders across seeds and check the
        # de-shuffling rule against the recorded order.
        seen = set()
        for seed in range(16):
            verdict = judge_pairwise("x", "def a", "def b", self.contexts,
                                     StaticClient("WIN"), rng_seed=seed)
            seen.add(verdict.presented_order)
            if verdict.presented_order == ("a", "b"):
                assert verdict.de_shuffled_value == "WIN"
            else:
                assert verdict.de_shuffled_value == "LOSE"
        assert seen == {("a", "b"), ("b", "a")}

    def test_draw_symmetric(self):
        for seed in range(8):
            verdict = judge_pairwise("x", "def a", "def b", self.contexts,
                                     StaticClient("DRAW"), rng_seed=seed)
            assert verdict.de_shuffled_value == "DRAW"

    def test_presented_order_matches_prompt(self):
        client = StaticClient("WIN")
        verdict = judge_pairwise("x", "AAA-def", "BBB-def", self.contexts,
                                 client, rng_seed=3)
        prompt = client.prompts[0]
        first = prompt.index("AAA-def") < prompt.index("BBB-def")
        assert (verdict.presented_order == ("a", "b")) == first

    def test_position_biased_judge_neutralized(self):
        # A judge that always prefers the first-presented definition: after
        # de-shuffling over n seeded trials the win rate must approach 1/2.
        n = 1000
        wins = 0
        for seed in range(n):
            verdict = judge_pairwise("x", "def a", "def b", self.contexts,
                                     StaticClient("WIN"), rng_seed=seed)
            wins += verdict.de_shuffled_value == "WIN"
        rate = wins / n
        bound = 3 * math.sqrt(0.25 / n)
        assert abs(rate - 0.5) <= bound


class WordIndexedJudge:
    """Pointwise: CORRECT iff the word's index is below a threshold.
    Pairwise: prefers the model definition on even items, the reference on
    odd items, regardless of presentation order.
    """

    model_name = "scripted-judge"

    def __init__(self, correct_below):
        self.correct_below = correct_below

    def complete(self, prompt):
        word = re.search(r"\[Słowo\]\n(w\d+)", prompt).group(1)
        index = int(word[1:])
        if "[Definicja referencyjna]" in prompt:
            return "CORRECT" if index < self.correct_below else "INCORRECT"
        first = re.search(r"\[Definicja 1\]\n([^\n]+)", prompt).group(1)
        model_first = first.startswith("MODEL")
        prefer_model = index % 2 == 0
        return "WIN" if model_first == prefer_model else "LOSE"


class TestRunDefinitionEvaluation:
    def dataset(self, n):
        return [
            {
                "neologism": f"w{i}",
                "reference_definition": f"REF definicja {i}",
                "examples": [f"Zdanie {i}-{j}." for j in range(5)],
            }
            for i in range(n)
        ]

    def test_accuracy_table(self):
        report = run_definition_evaluation(
            self.dataset(81),
            generator_client=StaticClient("MODEL definicja"),
            judge_client=WordIndexedJudge(correct_below=71),
            shots_list=[5],
        )
        cell = report.pointwise[5]
        assert cell["correct"] == 71
        assert cell["incorrect"] == 10
        assert cell["accuracy"] == pytest.approx(71 / 81)

    def test_empty_dataset(self):
        report = run_definition_evaluation(
            [], StaticClient("MODEL d"), WordIndexedJudge(0), shots_list=[0, 3, 5]
        )
        for shots in (0, 3, 5):
            assert report.pointwise[shots]["accuracy"] == 0.0
            assert report.pairwise[shots]["win_rate"] == 0.0

    def test_alternating_preference_gives_half_win_rate(self):
        report = run_definition_evaluation(
            self.dataset(10),
            generator_client=StaticClient("MODEL definicja"),
            judge_client=WordIndexedJudge(correct_below=10),
            shots_list=[3],
        )
        cell = report.pairwise[3]
        assert cell["win"] == 5 and cell["lose"] == 5
        assert cell["win_rate"] == pytest.approx(0.5)

    def test_item_errors_do_not_abort(self):
        data = self.dataset(3)
        data[1]["examples"] = ["tylko jedno zdanie"]
        report = run_definition_evaluation(
            data, StaticClient("MODEL d"), WordIndexedJudge(3), shots_list=[5]
        )
        assert report.pointwise[5]["correct"] + report.pointwise[5]["incorrect"] == 2
        assert any("w1" in e for e in report.errors)


class TestScriptedClient:
    def test_maps_prompt_hash(self):
        client = ScriptedClient.for_prompts({"hello": "world"})
        assert client.complete("hello") == "world"
        assert prompt_hash("hello") in client.responses

    def test_unknown_prompt_raises(self):
        client = ScriptedClient({})
        with pytest.raises(LlmError):
            client.complete("unseen")

    def test_loads_from_file(self, tmp_path):
        path = tmp_path / "responses.json"
        path.write_text(
            __import__("json").dumps({prompt_hash("p"): "odp"}), encoding="utf-8"
        )
        assert ScriptedClient(path).complete("p") == "odp"


class TestFilterVerdictParse:
    def test_tak(self):
        assert parse_filter_verdict("Uzasadnienie...\nNeologizm: tak") is True

    def test_nie_case_insensitive(self):
        assert parse_filter_verdict("NEOLOGIZM: NIE") is False

    def test_last_marker_wins(self):
        text = "Neologizm: nie... ale po namyśle.\nNeologizm: tak"
        assert parse_filter_verdict(text) is True

    def test_missing_marker(self):
        with pytest.raises(LlmParseError):
            parse_filter_verdict("długi wywód bez odpowiedzi")
