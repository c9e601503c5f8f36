"""Embedded SQLite store with JSON values.

One file holds documents, candidate groups, filter decisions, review
decisions, stage reports, cached LLM artifacts and the active filter
configuration, so a whole research workspace is a single database file.
Writes are serialized behind a lock; reads see the last committed state.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..candidates import CandidateGroup
from ..filters import FilterConfig, FilterDecision, StageReport
from ..ingest import Document


class StoreError(Exception):
    pass


class UnknownGroupError(StoreError):
    pass


@dataclass(frozen=True)
class ReviewDecision:
    group_id: str
    status: str
    reviewer: str
    decided_at: datetime
    version: int

    def to_json(self) -> dict:
        return {
            "group_id": self.group_id,
            "status": self.status,
            "reviewer": self.reviewer,
            "decided_at": self.decided_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "version": self.version,
        }


@dataclass(frozen=True)
class TrendSeries:
    group_id: str
    buckets: List[Tuple[str, int]]  # (ISO date, occurrence count), dates strictly increasing

    def to_json(self) -> dict:
        return {
            "group_id": self.group_id,
            "buckets": [{"date": d, "count": c} for d, c in self.buckets],
        }


_SCHEMA = """
CREATE TABLE IF NOT EXISTS documents (
    id TEXT PRIMARY KEY,
    data TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS groups (
    id TEXT PRIMARY KEY,
    data TEXT NOT NULL,
    survived INTEGER NOT NULL DEFAULT 0,
    decisions TEXT NOT NULL DEFAULT '[]'
);
CREATE TABLE IF NOT EXISTS review_decisions (
    group_id TEXT NOT NULL,
    version INTEGER NOT NULL,
    data TEXT NOT NULL,
    PRIMARY KEY (group_id, version)
);
CREATE TABLE IF NOT EXISTS stage_reports (
    position INTEGER NOT NULL,
    data TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS llm_cache (
    group_id TEXT NOT NULL,
    prompt_hash TEXT NOT NULL,
    kind TEXT NOT NULL,
    data TEXT NOT NULL,
    PRIMARY KEY (group_id, prompt_hash)
);
CREATE TABLE IF NOT EXISTS meta (
    key TEXT PRIMARY KEY,
    data TEXT NOT NULL
);
"""

VALID_REVIEW_STATUSES = ("pending", "accepted", "rejected")

SORT_KEYS = ("base_form", "doc_freq", "term_freq", "unique_domains", "first_seen", "last_seen")


class Store:
    """All access goes through this class; connections are per-store and
    guarded by a re-entrant lock, making the store safe for the API's
    threaded request handling.
    """

    def __init__(self, path: str | Path = ":memory:"):
        self.path = str(path)
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        if self.path != ":memory:":
            self._conn.execute("PRAGMA journal_mode=WAL")
        with self._lock, self._conn:
            self._conn.executescript(_SCHEMA)

    def close(self):
        self._conn.close()

    # --- documents -------------------------------------------------------

    def add_documents(self, documents: Iterable[Document]) -> int:
        added = 0
        with self._lock, self._conn:
            for doc in documents:
                cur = self._conn.execute(
                    "INSERT OR IGNORE INTO documents (id, data) VALUES (?, ?)",
                    (doc.id, json.dumps(doc.to_json(), ensure_ascii=False)),
                )
                added += cur.rowcount
        return added

    def document_ids(self) -> set:
        with self._lock:
            rows = self._conn.execute("SELECT id FROM documents").fetchall()
        return {r[0] for r in rows}

    def iter_documents(self) -> List[Document]:
        with self._lock:
            rows = self._conn.execute("SELECT data FROM documents ORDER BY id").fetchall()
        return [Document.from_json(json.loads(r[0])) for r in rows]

    def document_count(self) -> int:
        with self._lock:
            return self._conn.execute("SELECT COUNT(*) FROM documents").fetchone()[0]

    # --- groups ----------------------------------------------------------

    def replace_groups(
        self,
        groups: Sequence[CandidateGroup],
        survivors: Iterable[str],
        decisions: Dict[str, List[FilterDecision]],
        now: Optional[datetime] = None,
    ) -> None:
        """Store a fresh pipeline result. Review decisions are preserved for
        group ids that already existed; new groups start pending (version 1).
        """
        survivor_set = set(survivors)
        now = now or datetime.now(timezone.utc)
        with self._lock, self._conn:
            existing = {
                r[0] for r in self._conn.execute("SELECT DISTINCT group_id FROM review_decisions")
            }
            self._conn.execute("DELETE FROM groups")
            for group in groups:
                status = self._latest_status(group.group_id) if group.group_id in existing \
                    else "pending"
                group.review_status = status
                self._conn.execute(
                    "INSERT INTO groups (id, data, survived, decisions) VALUES (?, ?, ?, ?)",
                    (
                        group.group_id,
                        json.dumps(group.to_json(), ensure_ascii=False),
                        int(group.group_id in survivor_set),
                        json.dumps(
                            [d.to_json() for d in decisions.get(group.group_id, [])],
                            ensure_ascii=False,
                        ),
                    ),
                )
                if group.group_id not in existing:
                    self._insert_review(group.group_id, "pending", "system", now, version=1)

    def _latest_status(self, group_id: str) -> str:
        row = self._conn.execute(
            "SELECT data FROM review_decisions WHERE group_id = ? "
            "ORDER BY version DESC LIMIT 1",
            (group_id,),
        ).fetchone()
        return json.loads(row[0])["status"] if row else "pending"

    def _load_group_row(self, row) -> Tuple[CandidateGroup, bool, List[FilterDecision]]:
        group = CandidateGroup.from_json(json.loads(row[0]))
        survived = bool(row[1])
        decisions = [FilterDecision(**d) for d in json.loads(row[2])]
        return group, survived, decisions

    def get_group(self, group_id: str) -> Tuple[CandidateGroup, bool, List[FilterDecision]]:
        with self._lock:
            row = self._conn.execute(
                "SELECT data, survived, decisions FROM groups WHERE id = ?", (group_id,)
            ).fetchone()
        if row is None:
            raise UnknownGroupError(f"unknown candidate group: {group_id!r}")
        return self._load_group_row(row)

    def all_groups(self) -> List[Tuple[CandidateGroup, bool, List[FilterDecision]]]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT data, survived, decisions FROM groups ORDER BY id"
            ).fetchall()
        return [self._load_group_row(r) for r in rows]

    def update_group(self, group: CandidateGroup) -> None:
        with self._lock, self._conn:
            cur = self._conn.execute(
                "UPDATE groups SET data = ? WHERE id = ?",
                (json.dumps(group.to_json(), ensure_ascii=False), group.group_id),
            )
            if cur.rowcount == 0:
                raise UnknownGroupError(f"unknown candidate group: {group.group_id!r}")

    def list_candidates(
        self,
        page: int = 1,
        page_size: int = 50,
        sort_key: str = "base_form",
        status_filter: Optional[str] = None,
        stage_filter: Optional[str] = None,
    ) -> Tuple[List[dict], int]:
        """Stable, paged candidate summaries and the total match count.

        ``stage_filter`` is either "survivors" (passed the whole chain) or a
        filter id meaning "rejected by that filter".
        """
        if page < 1:
            raise StoreError("page must be >= 1")
        if not 1 <= page_size <= 500:
            raise StoreError("page_size must be between 1 and 500")
        if sort_key not in SORT_KEYS:
            raise StoreError(f"invalid sort key {sort_key!r}; valid: {', '.join(SORT_KEYS)}")
        if status_filter is not None and status_filter not in VALID_REVIEW_STATUSES:
            raise StoreError(f"invalid status filter {status_filter!r}")

        summaries = []
        for group, survived, decisions in self.all_groups():
            if status_filter and group.review_status != status_filter:
                continue
            if stage_filter:
                if stage_filter == "survivors":
                    if not survived:
                        continue
                else:
                    rejection = next((d for d in decisions if not d.passed), None)
                    if rejection is None or rejection.filter_id != stage_filter:
                        continue
            stats = group.aggregate
            summaries.append(
                {
                    "id": group.group_id,
                    "base_form": group.base_form,
                    "members": list(group.members),
                    "variant_count": len(stats.surface_variants),
                    "doc_freq": stats.doc_freq,
                    "term_freq": stats.term_freq,
                    "unique_domains": stats.unique_domains,
                    "first_seen": stats.first_seen.strftime("%Y-%m-%dT%H:%M:%SZ")
                    if stats.first_seen else None,
                    "last_seen": stats.last_seen.strftime("%Y-%m-%dT%H:%M:%SZ")
                    if stats.last_seen else None,
                    "survived": survived,
                    "verdicts": [d.to_json() for d in decisions],
                    "review_status": group.review_status,
                    "has_definition": group.definition is not None,
                    "sentiment": group.sentiment.value if group.sentiment else None,
                    "domain": group.domain.value if group.domain else None,
                }
            )
        if sort_key in ("doc_freq", "term_freq", "unique_domains"):
            # counts read best in descending review order
            summaries.sort(key=lambda s: (-s[sort_key], s["id"]))
        else:
            summaries.sort(key=lambda s: ((s[sort_key] is None, s[sort_key] or ""), s["id"]))
        total = len(summaries)
        start = (page - 1) * page_size
        return summaries[start : start + page_size], total

    # --- review decisions --------------------------------------------------

    def _insert_review(
        self, group_id: str, status: str, reviewer: str, now: datetime, version: int
    ) -> ReviewDecision:
        decision = ReviewDecision(
            group_id=group_id, status=status, reviewer=reviewer,
            decided_at=now, version=version,
        )
        self._conn.execute(
            "INSERT INTO review_decisions (group_id, version, data) VALUES (?, ?, ?)",
            (group_id, version, json.dumps(decision.to_json(), ensure_ascii=False)),
        )
        return decision

    def set_review_status(
        self,
        group_id: str,
        status: str,
        reviewer: str,
        now: Optional[datetime] = None,
    ) -> ReviewDecision:
        if status not in VALID_REVIEW_STATUSES:
            raise StoreError(f"invalid review status {status!r}")
        with self._lock, self._conn:
            group, survived, decisions = self.get_group(group_id)
            row = self._conn.execute(
                "SELECT MAX(version) FROM review_decisions WHERE group_id = ?", (group_id,)
            ).fetchone()
            version = (row[0] or 0) + 1
            decision = self._insert_review(
                group_id, status, reviewer, now or datetime.now(timezone.utc), version
            )
            group.review_status = status
            self._conn.execute(
                "UPDATE groups SET data = ? WHERE id = ?",
                (json.dumps(group.to_json(), ensure_ascii=False), group_id),
            )
        return decision

    def review_history(self, group_id: str) -> List[ReviewDecision]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT data FROM review_decisions WHERE group_id = ? ORDER BY version",
                (group_id,),
            ).fetchall()
        out = []
        for (data,) in rows:
            d = json.loads(data)
            out.append(
                ReviewDecision(
                    group_id=d["group_id"], status=d["status"], reviewer=d["reviewer"],
                    decided_at=datetime.strptime(
                        d["decided_at"], "%Y-%m-%dT%H:%M:%SZ"
                    ).replace(tzinfo=timezone.utc),
                    version=d["version"],
                )
            )
        return out

    # --- trends ------------------------------------------------------------

    def frequency_trend(
        self,
        group_id: str,
        start: Optional[date] = None,
        end: Optional[date] = None,
    ) -> TrendSeries:
        """Daily occurrence counts for a group, empty days included as 0.
        Defaults to the group's first_seen..last_seen span.
        """
        group, _, _ = self.get_group(group_id)
        daily = group.aggregate.daily_counts
        if start is None:
            start = group.aggregate.first_seen.date() if group.aggregate.first_seen else None
        if end is None:
            end = group.aggregate.last_seen.date() if group.aggregate.last_seen else None
        if start is None or end is None:
            return TrendSeries(group_id=group_id, buckets=[])
        if end < start:
            raise StoreError(f"inverted trend window: {start} > {end}")
        buckets = []
        day = start
        while day <= end:
            key = day.isoformat()
            buckets.append((key, daily.get(key, 0)))
            day += timedelta(days=1)
        return TrendSeries(group_id=group_id, buckets=buckets)

    # --- stage reports -------------------------------------------------------

    def save_stage_reports(self, reports: Sequence[StageReport]) -> None:
        with self._lock, self._conn:
            self._conn.execute("DELETE FROM stage_reports")
            for i, report in enumerate(reports):
                self._conn.execute(
                    "INSERT INTO stage_reports (position, data) VALUES (?, ?)",
                    (i, json.dumps(report.to_json(), ensure_ascii=False)),
                )

    def load_stage_reports(self) -> List[StageReport]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT data FROM stage_reports ORDER BY position"
            ).fetchall()
        return [StageReport.from_json(json.loads(r[0])) for r in rows]

    # --- llm cache -------------------------------------------------------------

    def llm_cache_get(self, group_id: str, prompt_hash: str) -> Optional[dict]:
        with self._lock:
            row = self._conn.execute(
                "SELECT data FROM llm_cache WHERE group_id = ? AND prompt_hash = ?",
                (group_id, prompt_hash),
            ).fetchone()
        return json.loads(row[0]) if row else None

    def llm_cache_put(self, group_id: str, prompt_hash: str, kind: str, data: dict) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO llm_cache (group_id, prompt_hash, kind, data) "
                "VALUES (?, ?, ?, ?)",
                (group_id, prompt_hash, kind, json.dumps(data, ensure_ascii=False)),
            )

    # --- config ------------------------------------------------------------------

    def save_filter_config(self, config: FilterConfig, chain: Sequence[str]) -> None:
        payload = {
            "config": {
                "min_len": config.min_len,
                "max_len": config.max_len,
                "min_doc_freq": config.min_doc_freq,
                "min_lowercase": config.min_lowercase,
                "min_non_ne": config.min_non_ne,
                "min_polish_contexts": config.min_polish_contexts,
                "min_norm_edit_distance": config.min_norm_edit_distance,
                "min_unique_domains": config.min_unique_domains,
                "enabled_references": list(config.enabled_references),
                "llm_filter_enabled": config.llm_filter_enabled,
            },
            "chain": list(chain),
        }
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO meta (key, data) VALUES ('filter_config', ?)",
                (json.dumps(payload, ensure_ascii=False),),
            )

    def load_filter_config(self) -> Optional[Tuple[FilterConfig, List[str]]]:
        with self._lock:
            row = self._conn.execute(
                "SELECT data FROM meta WHERE key = 'filter_config'"
            ).fetchone()
        if row is None:
            return None
        payload = json.loads(row[0])
        raw = dict(payload["config"])
        raw["enabled_references"] = tuple(raw.get("enabled_references", ()))
        return FilterConfig(**raw), list(payload["chain"])
