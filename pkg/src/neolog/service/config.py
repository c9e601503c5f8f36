"""Workspace configuration: one YAML file covering filter thresholds,
lexicon paths, LLM endpoints, the feed list and the analyzer adapter.
Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import yaml

from ..analyze import (
    AnalyzerAdapter,
    HttpAnalyzerAdapter,
    IdentityAdapter,
    JsonlSubprocessAdapter,
    StaticAdapter,
)
from ..filters import FilterConfig, LexiconSet, default_chain
from ..lexicon import load_lexicon
from ..llm import FewShotExemplar, HttpChatClient, LlmConfig, ScriptedClient


class ConfigError(Exception):
    pass


DEFAULT_POSITIVE_EXEMPLARS = [
    FewShotExemplar("sepulkować", [
        "Nie mam pojęcia, jak się sepulkuje, ale wszyscy o tym mówią.",
        "Sepulkowanie stało się modne wśród młodych internautów.",
    ]),
    FewShotExemplar("blurwa", [
        "Ta blurwa znowu zawiesiła mi cały komputer.",
        "Nowa blurwa w aktualizacji psuje zapis gry.",
    ]),
    FewShotExemplar("domofonić", [
        "Przestań domofonić o szóstej rano, sąsiedzi śpią.",
        "Kurier domofonił trzy razy, zanim otworzyłem.",
    ]),
]

DEFAULT_NEGATIVE_EXEMPLARS = [
    FewShotExemplar("komputer", [
        "Kupiłem nowy komputer do pracy zdalnej.",
        "Komputer w biurze wymaga wymiany dysku.",
    ]),
    FewShotExemplar("wczoraj", [
        "Wczoraj padał deszcz przez cały dzień.",
        "Rozmawialiśmy o tym wczoraj wieczorem.",
    ]),
    FewShotExemplar("szkoła", [
        "Szkoła organizuje w piątek festyn rodzinny.",
        "Po lekcjach dzieci wracają ze szkoły autobusem.",
    ]),
]


@dataclass
class AppConfig:
    base_dir: Path
    store_path: Path
    feeds_path: Optional[Path]
    filter_config: FilterConfig
    chain: List[str]
    lexicon_paths: Dict[str, object]
    llm: Optional[LlmConfig]
    llm_kind: str  # "http" | "scripted" | "none"
    llm_scripted_path: Optional[Path]
    llm_parallelism: int
    judge: Optional[LlmConfig]
    analyzer: dict
    grouping_mode: str
    exemplars: Tuple[List[FewShotExemplar], List[FewShotExemplar]]

    def load_lexicons(self) -> LexiconSet:
        paths = self.lexicon_paths
        lexicons = LexiconSet()
        if paths.get("dictionary"):
            lexicons.dictionary = load_lexicon(paths["dictionary"], "dictionary", name="dictionary")
        if paths.get("english"):
            lexicons.english = load_lexicon(paths["english"], "dictionary", name="english")
        for name, path in (paths.get("references") or {}).items():
            lexicons.references[name] = load_lexicon(path, "frequency-list", name=name)
        return lexicons

    def make_llm_client(self):
        if self.llm_kind == "none":
            return None
        if self.llm_kind == "scripted":
            if not self.llm_scripted_path:
                raise ConfigError("scripted llm client needs a responses file")
            return ScriptedClient(self.llm_scripted_path)
        if self.llm is None:
            raise ConfigError("llm endpoint configuration missing")
        return HttpChatClient(self.llm)

    def make_judge_client(self):
        if self.judge is None:
            return self.make_llm_client()
        return HttpChatClient(self.judge)

    def make_adapter(self) -> AnalyzerAdapter:
        kind = self.analyzer.get("kind", "identity")
        if kind == "identity":
            return IdentityAdapter()
        if kind == "subprocess":
            command = self.analyzer.get("command")
            if not command:
                raise ConfigError("subprocess analyzer needs a command")
            return JsonlSubprocessAdapter(
                command, timeout=float(self.analyzer.get("timeout", 10.0))
            )
        if kind == "http":
            url = self.analyzer.get("url")
            if not url:
                raise ConfigError("http analyzer needs a url")
            return HttpAnalyzerAdapter(url, timeout=float(self.analyzer.get("timeout", 10.0)))
        if kind == "static":
            return StaticAdapter(
                lemmas=self.analyzer.get("lemmas") or {},
                proper_nouns=set(self.analyzer.get("proper_nouns") or []),
            )
        raise ConfigError(f"unknown analyzer kind {kind!r}")


def _exemplars_from(raw: Optional[dict]) -> Tuple[List[FewShotExemplar], List[FewShotExemplar]]:
    if not raw:
        return DEFAULT_POSITIVE_EXEMPLARS, DEFAULT_NEGATIVE_EXEMPLARS

    def build(items):
        return [FewShotExemplar(x["word"], list(x["examples"])) for x in items]

    positive = build(raw.get("positive", []))
    negative = build(raw.get("negative", []))
    if len(positive) != 3 or len(negative) != 3:
        raise ConfigError("exemplars need exactly 3 positive and 3 negative entries")
    return positive, negative


def load_config(path: str | Path) -> AppConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
    base = path.parent

    def resolve(p):
        return (base / p).resolve() if p else None

    filters_raw = dict(raw.get("filters") or {})
    filters_raw["enabled_references"] = tuple(filters_raw.get("enabled_references", ()))
    try:
        filter_config = FilterConfig(**filters_raw)
    except TypeError as exc:
        raise ConfigError(f"bad filter settings: {exc}") from exc

    lex_raw = raw.get("lexicons") or {}
    lexicon_paths = {
        "dictionary": resolve(lex_raw.get("dictionary")),
        "english": resolve(lex_raw.get("english")),
        "references": {
            name: resolve(p) for name, p in (lex_raw.get("references") or {}).items()
        },
    }

    llm_raw = raw.get("llm") or {}
    llm_kind = llm_raw.get("kind", "http" if llm_raw.get("endpoint") else "none")
    llm_config = None
    if llm_raw.get("endpoint"):
        llm_config = LlmConfig(
            endpoint=llm_raw["endpoint"],
            model_name=llm_raw.get("model_name", "local-model"),
            temperature=float(llm_raw.get("temperature", 0.6)),
            top_p=float(llm_raw.get("top_p", 0.95)),
            max_tokens=int(llm_raw.get("max_tokens", 512)),
            timeout=float(llm_raw.get("timeout", 60.0)),
            retries=int(llm_raw.get("retries", 2)),
        )

    judge_raw = raw.get("judge") or {}
    judge_config = None
    if judge_raw.get("endpoint"):
        judge_config = LlmConfig(
            endpoint=judge_raw["endpoint"],
            model_name=judge_raw.get("model_name", "judge-model"),
            temperature=float(judge_raw.get("temperature", 0.6)),
            top_p=float(judge_raw.get("top_p", 0.95)),
            max_tokens=int(judge_raw.get("max_tokens", 512)),
            timeout=float(judge_raw.get("timeout", 60.0)),
            retries=int(judge_raw.get("retries", 2)),
        )

    chain = list(raw.get("chain") or default_chain(filter_config))
    grouping_mode = raw.get("grouping_mode", "context-free")
    if grouping_mode not in ("context-free", "in-context"):
        raise ConfigError(f"unknown grouping_mode {grouping_mode!r}")

    return AppConfig(
        base_dir=base,
        store_path=resolve(raw.get("store", "neolog.db")),
        feeds_path=resolve(raw.get("feeds")),
        filter_config=filter_config,
        chain=chain,
        lexicon_paths=lexicon_paths,
        llm=llm_config,
        llm_kind=llm_kind,
        llm_scripted_path=resolve(llm_raw.get("responses")),
        llm_parallelism=int(llm_raw.get("parallelism", 4)),
        judge=judge_config,
        analyzer=dict(raw.get("analyzer") or {"kind": "identity"}),
        grouping_mode=grouping_mode,
        exemplars=_exemplars_from(raw.get("exemplars")),
    )
