"""CSV export of candidate groups (RFC 4180, UTF-8).

The export is a pure function of the selected groups, and
export -> parse -> export of the parsed rows is byte-identical.
"""

from __future__ import annotations

import csv
import io
from typing import Iterable, List, Sequence

from ..candidates import CandidateGroup

CSV_HEADER = [
    "base_form", "variants", "doc_freq", "term_freq", "unique_domains",
    "first_seen", "last_seen", "review_status", "definition", "sentiment",
    "domain", "sample_context",
]


def _variants_field(group: CandidateGroup) -> str:
    pairs = sorted(group.aggregate.surface_variants.items())
    return "; ".join(f"{surface}:{count}" for surface, count in pairs)


def group_to_row(group: CandidateGroup) -> List[str]:
    stats = group.aggregate
    fmt = "%Y-%m-%dT%H:%M:%SZ"
    return [
        group.base_form,
        _variants_field(group),
        str(stats.doc_freq),
        str(stats.term_freq),
        str(stats.unique_domains),
        stats.first_seen.strftime(fmt) if stats.first_seen else "",
        stats.last_seen.strftime(fmt) if stats.last_seen else "",
        group.review_status,
        group.definition.text if group.definition else "",
        group.sentiment.value if group.sentiment else "",
        group.domain.value if group.domain else "",
        stats.contexts[0].sentence if stats.contexts else "",
    ]


def export_rows(rows: Iterable[Sequence[str]]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(list(row))
    return buffer.getvalue().encode("utf-8")


def export_csv(groups: Iterable[CandidateGroup]) -> bytes:
    """Serialize groups sorted by base form. Header fields are fixed; values
    are quoted per RFC 4180 only when needed.
    """
    ordered = sorted(groups, key=lambda g: g.base_form)
    return export_rows(group_to_row(g) for g in ordered)


def parse_csv(data: bytes) -> List[dict]:
    """Parse an export back into row dicts keyed by the header fields."""
    text = data.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise ValueError("empty CSV payload")
    header = rows[0]
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header: {header!r}")
    return [dict(zip(header, row)) for row in rows[1:]]


def rows_from_parsed(parsed: Iterable[dict]) -> List[List[str]]:
    return [[record[field] for field in CSV_HEADER] for record in parsed]
