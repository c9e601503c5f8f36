"""Prompt construction from the externalized template files.

Templates are plain text with str.format placeholders, so users can swap
in their own wording without touching code. All rendering is
byte-deterministic for fixed inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Sequence

SENTIMENT_LABELS = ("positive", "neutral", "negative")

DOMAIN_LABELS = (
    "Technology and Science",
    "Culture and Entertainment",
    "Social Life and Relationships",
    "Economy and Business",
    "Ecology and Environment",
    "Politics and Society",
)

_TEMPLATE_CACHE: Dict[str, str] = {}


def load_template(name: str) -> str:
    if name not in _TEMPLATE_CACHE:
        ref = resources.files("neolog.llm").joinpath("templates", f"{name}.txt")
        _TEMPLATE_CACHE[name] = ref.read_text(encoding="utf-8")
    return _TEMPLATE_CACHE[name]


def _numbered_examples(contexts: Sequence[str]) -> str:
    parts = []
    for i, sentence in enumerate(contexts, start=1):
        parts.append(f"\n[Przykład {i}]\n{sentence}\n")
    return "".join(parts)


def definition_prompt(neologism: str, contexts: Sequence[str], shots: int) -> str:
    used = list(contexts[:shots])
    clause = f" wzorując się na {shots} przykładach" if shots else ""
    return load_template("definition_pl").format(
        neologism=neologism,
        examples_clause=clause,
        examples_block=_numbered_examples(used),
    )


def pointwise_judge_prompt(
    neologism: str,
    reference_definition: str,
    candidate_definition: str,
    contexts: Sequence[str],
) -> str:
    return load_template("pointwise_judge_pl").format(
        neologism=neologism,
        num_examples=len(contexts),
        examples_block=_numbered_examples(contexts),
        reference_definition=reference_definition,
        candidate_definition=candidate_definition,
    )


def pairwise_judge_prompt(
    neologism: str,
    definition_1: str,
    definition_2: str,
    contexts: Sequence[str],
) -> str:
    return load_template("pairwise_judge_pl").format(
        neologism=neologism,
        num_examples=len(contexts),
        examples_block=_numbered_examples(contexts),
        definition_1=definition_1,
        definition_2=definition_2,
    )


def categorize_prompt(
    neologism: str,
    dimension: str,
    setup: str,
    contexts: Sequence[str],
    definition_text: Optional[str],
) -> str:
    if dimension == "sentiment":
        template = load_template("sentiment_pl")
        extra = {}
    elif dimension == "domain":
        template = load_template("domain_pl")
        extra = {"domain_list": ", ".join(DOMAIN_LABELS)}
    else:
        raise ValueError(f"unknown dimension: {dimension!r}")

    with_examples = setup in ("examples", "both")
    with_definition = setup in ("definition", "both")
    if with_examples and with_definition:
        clause = " oraz podanej definicji i przykładów użycia"
    elif with_examples:
        clause = " oraz podanych przykładów użycia"
    else:
        clause = " oraz podanej definicji"

    definition_block = (
        f"\n[Definicja]\n{definition_text}\n" if with_definition else ""
    )
    examples_block = _numbered_examples(contexts) if with_examples else ""
    return template.format(
        neologism=neologism,
        basis_clause=clause,
        definition_block=definition_block,
        examples_block=examples_block,
        **extra,
    )


@dataclass(frozen=True)
class FewShotExemplar:
    """An exemplar word with usage sentences for the few-shot filter prompt."""

    word: str
    examples: List[str]


def _exemplar_block(exemplars: Sequence[FewShotExemplar]) -> str:
    parts = []
    for ex in exemplars:
        examples = "\n".join(ex.examples)
        parts.append(f"[Słowo]\n{ex.word}\n[Przykłady]\n{examples}\n\n")
    return "".join(parts)


def neologism_filter_prompt(
    word: str,
    forms: Sequence[str],
    contexts: Sequence[str],
    positive: Sequence[FewShotExemplar],
    negative: Sequence[FewShotExemplar],
) -> str:
    if len(positive) != 3 or len(negative) != 3:
        raise ValueError("the filter prompt takes exactly 3 positive and 3 negative exemplars")
    return load_template("neologism_filter_pl").format(
        positive_block=_exemplar_block(positive),
        negative_block=_exemplar_block(negative),
        word=word,
        forms=", ".join(forms),
        examples="\n".join(contexts),
    )
