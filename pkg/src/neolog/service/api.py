"""HTTP/JSON API for the review workbench.

All reads are side-effect free; mutations go through the review, config
and on-demand LLM endpoints. The app is a plain factory over a Store so
tests can run it against a temporary database with mock clients.
"""

from __future__ import annotations

from datetime import date
from typing import List, Optional

from fastapi import FastAPI, HTTPException, Query, Response
from pydantic import BaseModel, Field

from ..candidates import CandidateGroup
from ..filters import FilterConfig, FilterError, LexiconSet
from ..llm import LlmError, categorize, generate_definition
from .config import DEFAULT_NEGATIVE_EXEMPLARS, DEFAULT_POSITIVE_EXEMPLARS
from .csvio import export_csv
from .pipeline import rerun_filters
from .store import Store, StoreError, UnknownGroupError


class StatusUpdate(BaseModel):
    status: str
    reviewer: str = "anonymous"


class DefinitionRequest(BaseModel):
    shots: int = 5


class CategoriesRequest(BaseModel):
    setup: str = "examples"


class FilterConfigUpdate(BaseModel):
    filters: dict = Field(default_factory=dict)
    chain: Optional[List[str]] = None


def _group_payload(group: CandidateGroup, survived: bool, decisions) -> dict:
    payload = group.to_json()
    payload["id"] = group.group_id
    payload["survived"] = survived
    payload["verdicts"] = [d.to_json() for d in decisions]
    payload["contexts"] = [
        {"sentence": c.sentence, "doc_id": c.doc_id,
         "timestamp": c.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ")}
        for c in group.aggregate.contexts
    ]
    return payload


def create_app(
    store: Store,
    llm_client=None,
    lexicons: Optional[LexiconSet] = None,
    exemplars=None,
    static_dir=None,
) -> FastAPI:
    app = FastAPI(title="neolog review service")
    exemplars = exemplars or (DEFAULT_POSITIVE_EXEMPLARS, DEFAULT_NEGATIVE_EXEMPLARS)

    def get_group_or_404(group_id: str):
        try:
            return store.get_group(group_id)
        except UnknownGroupError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/candidates")
    def list_candidates(
        page: int = Query(1, ge=1),
        page_size: int = Query(50, ge=1, le=500),
        sort_key: str = "base_form",
        status: Optional[str] = None,
        stage: Optional[str] = None,
    ):
        try:
            items, total = store.list_candidates(
                page=page, page_size=page_size, sort_key=sort_key,
                status_filter=status, stage_filter=stage,
            )
        except StoreError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {
            "items": items,
            "total": total,
            "page": page,
            "page_size": page_size,
            "stage_reports": [r.to_json() for r in store.load_stage_reports()],
        }

    @app.get("/candidates/{group_id}")
    def get_candidate(group_id: str):
        group, survived, decisions = get_group_or_404(group_id)
        payload = _group_payload(group, survived, decisions)
        payload["review_history"] = [d.to_json() for d in store.review_history(group_id)]
        return payload

    @app.get("/candidates/{group_id}/trend")
    def get_trend(group_id: str, start: Optional[date] = None, end: Optional[date] = None):
        get_group_or_404(group_id)
        try:
            return store.frequency_trend(group_id, start=start, end=end).to_json()
        except StoreError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/candidates/{group_id}/status")
    def set_status(group_id: str, update: StatusUpdate):
        get_group_or_404(group_id)
        try:
            decision = store.set_review_status(group_id, update.status, update.reviewer)
        except StoreError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return decision.to_json()

    @app.post("/candidates/{group_id}/definition")
    def request_definition(group_id: str, request: DefinitionRequest):
        group, _, _ = get_group_or_404(group_id)
        if group.definition is not None and group.definition.shots == request.shots:
            return group.definition.to_json()
        if llm_client is None:
            raise HTTPException(status_code=503, detail="no LLM client configured")
        contexts = group.aggregate.sample_sentences()
        try:
            definition = generate_definition(
                group.base_form, contexts, request.shots, llm_client
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except LlmError as exc:
            raise HTTPException(
                status_code=502,
                detail=f"LLM call failed, retry later: {exc}",
            )
        group.definition = definition
        store.update_group(group)
        return definition.to_json()

    @app.post("/candidates/{group_id}/categories")
    def request_categories(group_id: str, request: CategoriesRequest):
        group, _, _ = get_group_or_404(group_id)
        cached = (
            group.sentiment is not None and group.sentiment.setup == request.setup
            and group.domain is not None and group.domain.setup == request.setup
        )
        if cached:
            return {
                "sentiment": {"value": group.sentiment.value, "setup": group.sentiment.setup},
                "domain": {"value": group.domain.value, "setup": group.domain.setup},
            }
        if llm_client is None:
            raise HTTPException(status_code=503, detail="no LLM client configured")
        contexts = group.aggregate.sample_sentences()
        try:
            sentiment = categorize(group.base_form, request.setup, contexts,
                                   group.definition, "sentiment", llm_client)
            domain = categorize(group.base_form, request.setup, contexts,
                                group.definition, "domain", llm_client)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except LlmError as exc:
            raise HTTPException(
                status_code=502, detail=f"LLM call failed, retry later: {exc}"
            )
        group.sentiment = sentiment
        group.domain = domain
        store.update_group(group)
        return {
            "sentiment": {"value": sentiment.value, "setup": sentiment.setup},
            "domain": {"value": domain.value, "setup": domain.setup},
        }

    @app.get("/reports/stages")
    def report_stages():
        return [r.to_json() for r in store.load_stage_reports()]

    @app.put("/config/filters")
    def update_filters(update: FilterConfigUpdate):
        saved = store.load_filter_config()
        base = {}
        if saved is not None:
            base_config = saved[0]
            base = {
                "min_len": base_config.min_len,
                "max_len": base_config.max_len,
                "min_doc_freq": base_config.min_doc_freq,
                "min_lowercase": base_config.min_lowercase,
                "min_non_ne": base_config.min_non_ne,
                "min_polish_contexts": base_config.min_polish_contexts,
                "min_norm_edit_distance": base_config.min_norm_edit_distance,
                "min_unique_domains": base_config.min_unique_domains,
                "enabled_references": base_config.enabled_references,
                "llm_filter_enabled": base_config.llm_filter_enabled,
            }
        base.update(update.filters)
        if "enabled_references" in base:
            base["enabled_references"] = tuple(base["enabled_references"])
        try:
            new_config = FilterConfig(**base)
        except (FilterError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=f"invalid filter config: {exc}")
        if lexicons is None:
            raise HTTPException(status_code=503, detail="no lexicons loaded; rerun unavailable")
        try:
            reports = rerun_filters(
                store, new_config, chain=update.chain, lexicons=lexicons,
                llm_client=llm_client, exemplars=exemplars,
            )
        except FilterError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"stage_reports": [r.to_json() for r in reports]}

    @app.get("/export.csv")
    def export(status: Optional[str] = None, stage: Optional[str] = None):
        groups = []
        for group, survived, decisions in store.all_groups():
            if status and group.review_status != status:
                continue
            if stage:
                if stage == "survivors":
                    if not survived:
                        continue
                else:
                    rejection = next((d for d in decisions if not d.passed), None)
                    if rejection is None or rejection.filter_id != stage:
                        continue
            groups.append(group)
        return Response(content=export_csv(groups), media_type="text/csv; charset=utf-8")

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
