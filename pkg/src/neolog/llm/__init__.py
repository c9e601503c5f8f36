"""Chat-LLM client abstraction and its three applications: definition
generation, sentiment/domain categorization, and judge-based evaluation
of generated definitions (pointwise and pairwise with order shuffling).
"""

from __future__ import annotations

import hashlib
import json
import random
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .prompts import (
    DOMAIN_LABELS,
    SENTIMENT_LABELS,
    FewShotExemplar,
    categorize_prompt,
    definition_prompt,
    neologism_filter_prompt,
    pairwise_judge_prompt,
    pointwise_judge_prompt,
)

__all__ = [
    "LlmConfig", "LlmError", "LlmParseError", "HttpChatClient", "ScriptedClient",
    "StaticClient", "Definition", "SentimentLabel", "DomainLabel",
    "PointwiseVerdict", "PairwiseVerdict", "generate_definition", "categorize",
    "judge_pointwise", "judge_pairwise", "run_definition_evaluation",
    "parse_filter_verdict", "prompt_hash", "FewShotExemplar",
    "neologism_filter_prompt", "DOMAIN_LABELS", "SENTIMENT_LABELS",
    "DefinitionEvaluationReport",
]

PARSE_RETRIES = 2


class LlmError(Exception):
    pass


class LlmParseError(LlmError):
    def __init__(self, message: str, raw: str):
        super().__init__(f"{message}; raw response: {raw!r}")
        self.raw = raw


@dataclass(frozen=True)
class LlmConfig:
    endpoint: str = ""
    model_name: str = "local-model"
    temperature: float = 0.6
    top_p: float = 0.95
    max_tokens: int = 512
    timeout: float = 60.0
    retries: int = 2

    def __post_init__(self):
        if not 0 < self.temperature <= 1:
            raise ValueError(f"temperature must be in (0, 1], got {self.temperature}")
        if not 0 < self.top_p <= 1:
            raise ValueError(f"top_p must be in (0, 1], got {self.top_p}")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")


class HttpChatClient:
    """Chat-completion endpoint client. One user message per request;
    transport failures are retried with unchanged sampling parameters.
    """

    def __init__(self, config: LlmConfig):
        if not config.endpoint:
            raise LlmError("endpoint is required for the HTTP client")
        self.config = config

    @property
    def model_name(self) -> str:
        return self.config.model_name

    def complete(self, prompt: str) -> str:
        import requests

        payload = {
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "top_p": self.config.top_p,
            "max_tokens": self.config.max_tokens,
        }
        last_error: Optional[Exception] = None
        for _ in range(self.config.retries + 1):
            try:
                resp = requests.post(
                    self.config.endpoint, json=payload, timeout=self.config.timeout
                )
                resp.raise_for_status()
                data = resp.json()
                choice = data["choices"][0]
                text = choice.get("message", {}).get("content") or choice.get("text")
                if not text:
                    raise LlmError("endpoint returned an empty completion")
                return text
            except LlmError:
                raise
            except Exception as exc:
                last_error = exc
        raise LlmError(f"chat endpoint failed after retries: {last_error}")


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ScriptedClient:
    """Offline mock reading a prompt-hash -> response map, optionally from a
    JSON file. Unknown prompts raise, which keeps tests honest about exactly
    which prompts they exercise.
    """

    model_name = "scripted"

    def __init__(self, responses: Dict[str, str] | str | Path):
        if isinstance(responses, (str, Path)):
            responses = json.loads(Path(responses).read_text(encoding="utf-8"))
        self.responses = dict(responses)
        self.calls = 0

    @classmethod
    def for_prompts(cls, pairs: Dict[str, str]) -> "ScriptedClient":
        """Build from literal prompt -> response pairs."""
        return cls({prompt_hash(p): r for p, r in pairs.items()})

    def complete(self, prompt: str) -> str:
        self.calls += 1
        key = prompt_hash(prompt)
        if key not in self.responses:
            raise LlmError(f"no scripted response for prompt hash {key[:12]}…")
        return self.responses[key]


class StaticClient:
    """Mock returning a fixed response (or cycling through a list)."""

    model_name = "static"

    def __init__(self, response: str | Sequence[str]):
        self._responses = [response] if isinstance(response, str) else list(response)
        self.calls = 0
        self.prompts: List[str] = []

    def complete(self, prompt: str) -> str:
        self.prompts.append(prompt)
        text = self._responses[self.calls % len(self._responses)]
        self.calls += 1
        return text


# --- result types -------------------------------------------------------------

VALID_SHOTS = (0, 3, 5)


@dataclass(frozen=True)
class Definition:
    neologism: str
    text: str
    shots: int
    examples_used: Tuple[str, ...]
    model_name: str
    created_at: datetime

    def __post_init__(self):
        if self.shots not in VALID_SHOTS:
            raise ValueError(f"shots must be one of {VALID_SHOTS}, got {self.shots}")
        if len(self.examples_used) != self.shots:
            raise ValueError("examples_used length must equal shots")

    def to_json(self) -> dict:
        return {
            "neologism": self.neologism,
            "text": self.text,
            "shots": self.shots,
            "examples_used": list(self.examples_used),
            "model_name": self.model_name,
            "created_at": self.created_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Definition":
        return cls(
            neologism=data["neologism"],
            text=data["text"],
            shots=data["shots"],
            examples_used=tuple(data["examples_used"]),
            model_name=data["model_name"],
            created_at=datetime.strptime(data["created_at"], "%Y-%m-%dT%H:%M:%SZ").replace(
                tzinfo=timezone.utc
            ),
        )


@dataclass(frozen=True)
class SentimentLabel:
    value: str
    setup: str

    def __post_init__(self):
        if self.value not in SENTIMENT_LABELS:
            raise ValueError(f"bad sentiment {self.value!r}")


@dataclass(frozen=True)
class DomainLabel:
    value: str
    setup: str

    def __post_init__(self):
        if self.value not in DOMAIN_LABELS:
            raise ValueError(f"bad domain {self.value!r}")


@dataclass(frozen=True)
class PointwiseVerdict:
    value: str  # CORRECT | INCORRECT

    def __post_init__(self):
        if self.value not in ("CORRECT", "INCORRECT"):
            raise ValueError(f"bad pointwise verdict {self.value!r}")


@dataclass(frozen=True)
class PairwiseVerdict:
    value: str  # WIN | DRAW | LOSE, as emitted for the presented order
    presented_order: Tuple[str, str]
    de_shuffled_value: str  # mapped back to canonical (a, b) orientation

    def __post_init__(self):
        for v in (self.value, self.de_shuffled_value):
            if v not in ("WIN", "DRAW", "LOSE"):
                raise ValueError(f"bad pairwise verdict {v!r}")


# --- response parsing ---------------------------------------------------------

_SENTIMENT_ALIASES = {
    "pozytywny": "positive", "pozytywne": "positive", "positive": "positive",
    "neutralny": "neutral", "neutralne": "neutral", "neutral": "neutral",
    "negatywny": "negative", "negatywne": "negative", "negative": "negative",
}


def _last_match(text: str, options: Dict[str, str]) -> Optional[str]:
    """Scan for option names (case-insensitive); the last occurrence wins.
    Reasoning-style models explain first and answer last.
    """
    lowered = text.lower()
    best_pos, best_value = -1, None
    for name, value in options.items():
        pattern = r"(?<![\w])" + re.escape(name.lower()) + r"(?![\w])"
        for m in re.finditer(pattern, lowered):
            if m.start() > best_pos:
                best_pos, best_value = m.start(), value
    return best_value


def parse_sentiment(text: str) -> str:
    value = _last_match(text, _SENTIMENT_ALIASES)
    if value is None:
        raise LlmParseError("no sentiment category found", text)
    return value


def parse_domain(text: str) -> str:
    options = {label: label for label in DOMAIN_LABELS}
    value = _last_match(text, options)
    if value is None:
        raise LlmParseError("no domain category found", text)
    return value


def parse_pointwise(text: str) -> str:
    value = _last_match(text, {"correct": "CORRECT", "incorrect": "INCORRECT"})
    if value is None:
        raise LlmParseError("no CORRECT/INCORRECT verdict found", text)
    return value


def parse_pairwise(text: str) -> str:
    value = _last_match(text, {"win": "WIN", "draw": "DRAW", "lose": "LOSE"})
    if value is None:
        raise LlmParseError("no WIN/DRAW/LOSE verdict found", text)
    return value


_FILTER_VERDICT_RE = re.compile(r"neologizm\s*:\s*<?\s*(tak|nie)", re.IGNORECASE)


def parse_filter_verdict(text: str) -> bool:
    """Parse the final ``Neologizm: tak|nie`` marker; last match wins."""
    matches = _FILTER_VERDICT_RE.findall(text)
    if not matches:
        raise LlmParseError("no 'Neologizm: tak|nie' marker found", text)
    return matches[-1].lower() == "tak"


def _complete_and_parse(client, prompt: str, parse, retries: int = PARSE_RETRIES):
    last: Optional[Exception] = None
    for _ in range(retries + 1):
        text = client.complete(prompt)
        try:
            return parse(text), text
        except LlmParseError as exc:
            last = exc
    raise last


# --- operations ---------------------------------------------------------------

def generate_definition(
    neologism: str,
    contexts: Sequence[str],
    shots: int,
    client,
    now: Optional[datetime] = None,
) -> Definition:
    """Generate a definition with 0, 3 or 5 usage examples embedded in the
    prompt (the first ``shots`` contexts, in order). The response text is
    stored verbatim.
    """
    if shots not in VALID_SHOTS:
        raise ValueError(f"shots must be one of {VALID_SHOTS}, got {shots}")
    if len(contexts) < shots:
        raise ValueError(f"need at least {shots} contexts, got {len(contexts)}")
    prompt = definition_prompt(neologism, contexts, shots)
    text = client.complete(prompt)
    if not text or not text.strip():
        raise LlmError(f"empty definition returned for {neologism!r}")
    return Definition(
        neologism=neologism,
        text=text,
        shots=shots,
        examples_used=tuple(contexts[:shots]),
        model_name=getattr(client, "model_name", "unknown"),
        created_at=now or datetime.now(timezone.utc),
    )


def categorize(
    neologism: str,
    setup: str,
    contexts: Sequence[str],
    definition: Optional[Definition],
    dimension: str,
    client,
):
    """Assign a sentiment or domain label. Setups: ``examples`` uses 5 usage
    examples, ``definition`` a generated definition, ``both`` combines them.
    """
    if setup not in ("examples", "definition", "both"):
        raise ValueError(f"unknown setup {setup!r}")
    if setup in ("examples", "both") and len(contexts) < 5:
        raise ValueError(f"setup {setup!r} requires at least 5 contexts")
    if setup in ("definition", "both") and definition is None:
        raise ValueError(f"setup {setup!r} requires a definition")
    used = list(contexts[:5]) if setup in ("examples", "both") else []
    prompt = categorize_prompt(
        neologism, dimension, setup, used,
        definition.text if definition else None,
    )
    if dimension == "sentiment":
        value, _ = _complete_and_parse(client, prompt, parse_sentiment)
        return SentimentLabel(value=value, setup=setup)
    value, _ = _complete_and_parse(client, prompt, parse_domain)
    return DomainLabel(value=value, setup=setup)


def judge_pointwise(
    neologism: str,
    reference_definition: str,
    candidate_definition: str,
    contexts: Sequence[str],
    judge_client,
) -> PointwiseVerdict:
    if not reference_definition.strip() or not candidate_definition.strip():
        raise ValueError("both definitions must be non-empty")
    if len(contexts) < 5:
        raise ValueError("pointwise judging requires all 5 usage examples")
    prompt = pointwise_judge_prompt(
        neologism, reference_definition, candidate_definition, list(contexts[:5])
    )
    value, _ = _complete_and_parse(judge_client, prompt, parse_pointwise)
    return PointwiseVerdict(value=value)


_SWAP = {"WIN": "LOSE", "LOSE": "WIN", "DRAW": "DRAW"}


def judge_pairwise(
    neologism: str,
    definition_a: str,
    definition_b: str,
    contexts: Sequence[str],
    judge_client,
    rng_seed: int,
) -> PairwiseVerdict:
    """Compare two definitions with the presentation order drawn from the
    seed, then map the verdict back to the canonical (a, b) orientation.
    """
    if not definition_a.strip() or not definition_b.strip():
        raise ValueError("both definitions must be non-empty")
    swap = random.Random(rng_seed).random() < 0.5
    first, second = (definition_b, definition_a) if swap else (definition_a, definition_b)
    order = ("b", "a") if swap else ("a", "b")
    prompt = pairwise_judge_prompt(neologism, first, second, list(contexts[:5]))
    value, _ = _complete_and_parse(judge_client, prompt, parse_pairwise)
    return PairwiseVerdict(
        value=value,
        presented_order=order,
        de_shuffled_value=_SWAP[value] if swap else value,
    )


@dataclass
class DefinitionEvaluationReport:
    """Per-shots pointwise and pairwise tallies over an evaluation dataset."""

    pointwise: Dict[int, Dict[str, float]] = field(default_factory=dict)
    pairwise: Dict[int, Dict[str, float]] = field(default_factory=dict)
    errors: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "pointwise": {str(k): v for k, v in self.pointwise.items()},
            "pairwise": {str(k): v for k, v in self.pairwise.items()},
            "errors": list(self.errors),
        }


def run_definition_evaluation(
    dataset: Sequence[dict],
    generator_client,
    judge_client,
    shots_list: Sequence[int] = VALID_SHOTS,
    seed: int = 0,
) -> DefinitionEvaluationReport:
    """For each shots setting: generate a definition per item, judge it
    pointwise against the reference and pairwise against it with shuffled
    order. Items need keys ``neologism``, ``reference_definition`` and
    ``examples`` (at least 5). Per-item failures are reported; the run
    continues.
    """
    report = DefinitionEvaluationReport()
    for shots in shots_list:
        correct = incorrect = 0
        win = draw = lose = 0
        for index, item in enumerate(dataset):
            word = item["neologism"]
            contexts = item["examples"]
            if len(contexts) < 5:
                report.errors.append(f"{word}: fewer than 5 usage examples, skipped")
                continue
            try:
                definition = generate_definition(word, contexts, shots, generator_client)
                pointwise = judge_pointwise(
                    word, item["reference_definition"], definition.text,
                    contexts, judge_client,
                )
                pairwise = judge_pairwise(
                    word, definition.text, item["reference_definition"],
                    contexts, judge_client,
                    rng_seed=seed * 1_000_003 + shots * 1_009 + index,
                )
            except (LlmError, ValueError) as exc:
                report.errors.append(f"{word} (shots={shots}): {exc}")
                continue
            if pointwise.value == "CORRECT":
                correct += 1
            else:
                incorrect += 1
            if pairwise.de_shuffled_value == "WIN":
                win += 1
            elif pairwise.de_shuffled_value == "DRAW":
                draw += 1
            else:
                lose += 1
        total = correct + incorrect
        report.pointwise[shots] = {
            "correct": correct,
            "incorrect": incorrect,
            "accuracy": correct / total if total else 0.0,
        }
        total_pairs = win + draw + lose
        report.pairwise[shots] = {
            "win": win,
            "draw": draw,
            "lose": lose,
            "win_rate": win / total_pairs if total_pairs else 0.0,
        }
    return report
