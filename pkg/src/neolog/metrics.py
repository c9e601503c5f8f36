"""Evaluation metrics: precision/recall/F1 against gold sets, group
consistency ratios for lemmatization, and accuracy/macro-F1 for closed-set
categorization. All zero denominators resolve to 0.0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Sequence, Set, Tuple


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def _f1(precision: float, recall: float) -> float:
    return _safe_div(2 * precision * recall, precision + recall)


@dataclass(frozen=True)
class PrfReport:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float

    def to_json(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "fn": self.fn,
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
        }


def compute_prf(predicted: Set[str], gold: Set[str]) -> PrfReport:
    tp = len(predicted & gold)
    fp = len(predicted - gold)
    fn = len(gold - predicted)
    precision = _safe_div(tp, tp + fp)
    recall = _safe_div(tp, tp + fn)
    return PrfReport(tp, fp, fn, precision, recall, _f1(precision, recall))


@dataclass(frozen=True)
class GroupAccuracyReport:
    total_groups: int       # G
    consistent_groups: int  # S: all predicted lemmas in the group identical
    strict_groups: int      # K: all predicted lemmas equal the gold base form
    group_accuracy: float   # S / G
    strict_group_accuracy: float  # K / G
    plain_accuracy: float   # correctly lemmatized forms / total forms

    def to_json(self) -> dict:
        return {
            "total_groups": self.total_groups,
            "consistent_groups": self.consistent_groups,
            "strict_groups": self.strict_groups,
            "group_accuracy": self.group_accuracy,
            "strict_group_accuracy": self.strict_group_accuracy,
            "plain_accuracy": self.plain_accuracy,
        }


GroupInstance = Tuple[str, Sequence[Tuple[str, str]]]
"""(gold base form, [(inflected form, predicted lemma), ...])"""


def compute_group_accuracy(groups: Sequence[GroupInstance]) -> GroupAccuracyReport:
    """Group-level lemmatization quality.

    A group is consistent when every form got the same predicted lemma,
    correct or not; it is strict when every predicted lemma equals the gold
    base form. Plain accuracy counts per-form equality to gold.
    """
    if not groups:
        raise ValueError("group list is empty")
    g = len(groups)
    s = k = 0
    correct_forms = total_forms = 0
    for gold_base, forms in groups:
        if not forms:
            raise ValueError(f"group {gold_base!r} has no forms")
        lemmas = [lemma for _, lemma in forms]
        if len(set(lemmas)) == 1:
            s += 1
            if lemmas[0] == gold_base:
                k += 1
        correct_forms += sum(1 for lemma in lemmas if lemma == gold_base)
        total_forms += len(lemmas)
    return GroupAccuracyReport(
        total_groups=g,
        consistent_groups=s,
        strict_groups=k,
        group_accuracy=_safe_div(s, g),
        strict_group_accuracy=_safe_div(k, g),
        plain_accuracy=_safe_div(correct_forms, total_forms),
    )


@dataclass(frozen=True)
class CategorizationReport:
    accuracy: float
    per_class_f1: Dict[str, float]
    macro_f1: float

    def to_json(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_class_f1": dict(self.per_class_f1),
            "macro_f1": self.macro_f1,
        }


def compute_categorization(
    predictions: Sequence[str], gold: Sequence[str], label_set: Sequence[str]
) -> CategorizationReport:
    """Exact-match accuracy plus one-vs-rest F1 per class and its unweighted
    mean over the full label set (classes absent from the data score 0).
    """
    if len(predictions) != len(gold):
        raise ValueError(f"length mismatch: {len(predictions)} predictions, {len(gold)} gold")
    labels = list(label_set)
    allowed = set(labels)
    for value in list(predictions) + list(gold):
        if value not in allowed:
            raise ValueError(f"label {value!r} is not in the declared label set")

    correct = sum(1 for p, g in zip(predictions, gold) if p == g)
    accuracy = _safe_div(correct, len(gold))

    per_class: Dict[str, float] = {}
    for label in labels:
        tp = sum(1 for p, g in zip(predictions, gold) if p == label and g == label)
        fp = sum(1 for p, g in zip(predictions, gold) if p == label and g != label)
        fn = sum(1 for p, g in zip(predictions, gold) if p != label and g == label)
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        per_class[label] = _f1(precision, recall)

    macro = _safe_div(sum(per_class.values()), len(labels))
    return CategorizationReport(accuracy=accuracy, per_class_f1=per_class, macro_f1=macro)


def render_stage_table(rows) -> str:
    """Aligned plain-text table of incremental filtering results. Rows are
    any objects with stage_label/remaining/gold_matches/precision/recall/f1.
    """
    headers = ["Conditions", "All", "Matches", "Precision", "Recall", "F1"]
    body: List[List[str]] = []
    for row in rows:
        body.append([
            row.stage_label,
            f"{row.remaining}",
            "" if row.gold_matches is None else f"{row.gold_matches}",
            "" if row.precision is None else f"{row.precision:.3f}",
            "" if row.recall is None else f"{row.recall:.3f}",
            "" if row.f1 is None else f"{row.f1:.3f}",
        ])
    widths = [max(len(headers[i]), *(len(r[i]) for r in body)) if body else len(headers[i])
              for i in range(len(headers))]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    lines.append("  ".join("-" * w for w in widths))
    for r in body:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(r))))
    return "\n".join(lines)


def stage_rows_to_json(rows) -> str:
    return json.dumps([r.to_json() for r in rows], ensure_ascii=False, indent=2)


def render_categorization_table(results: Dict[str, CategorizationReport]) -> str:
    """Aligned accuracy/macro-F1 table, one row per dimension."""
    headers = ["Dimension", "Accuracy", "Macro F1"]
    body = [
        [name, f"{report.accuracy:.4f}", f"{report.macro_f1:.4f}"]
        for name, report in results.items()
    ]
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in body)) if body else len(headers[i])
        for i in range(len(headers))
    ]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    lines.append("  ".join("-" * w for w in widths))
    for r in body:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(r))))
    return "\n".join(lines)
