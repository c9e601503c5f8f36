"""Command-line entry points: ingestion, pipeline runs, reports with
figures, the evaluation harnesses, the review API server and CSV export.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analyze import IdentityAdapter
from .metrics import (
    compute_categorization,
    compute_group_accuracy,
    render_categorization_table,
)
from .llm import DOMAIN_LABELS, SENTIMENT_LABELS, categorize, run_definition_evaluation
from .service.config import load_config
from .service.csvio import export_csv
from .service.pipeline import ingest_feeds, run_pipeline
from .service.reporting import stage_table_text, write_stage_report_files
from .service.store import Store


def _store_from(args) -> Store:
    if getattr(args, "store", None):
        return Store(args.store)
    if getattr(args, "config", None):
        return Store(load_config(args.config).store_path)
    return Store("neolog.db")


def cmd_ingest(args) -> int:
    store = _store_from(args)
    result = ingest_feeds(store, args.feeds)
    print(f"ingested {len(result.documents)} new documents "
          f"({len(result.dropped)} dropped, {len(result.errors)} source errors)")
    for source, message in result.errors:
        print(f"  error: {source}: {message}", file=sys.stderr)
    return 0


def cmd_pipeline_run(args) -> int:
    config = load_config(args.config)
    store = Store(config.store_path)
    lexicons = config.load_lexicons()
    gold = None
    if args.gold:
        gold = {
            line.strip()
            for line in Path(args.gold).read_text(encoding="utf-8").splitlines()
            if line.strip() and not line.startswith("#")
        }
    llm_client = config.make_llm_client() if config.filter_config.llm_filter_enabled else None
    result = run_pipeline(
        store,
        lexicons,
        config.filter_config,
        config.chain,
        adapter=config.make_adapter(),
        grouping_mode=config.grouping_mode,
        gold=gold,
        llm_client=llm_client,
        exemplars=config.exemplars,
    )
    print(stage_table_text(result.reports))
    print(f"\n{len(result.survivors)} candidate groups survived "
          f"out of {len(result.groups)}")
    return 0


def cmd_report_stages(args) -> int:
    store = _store_from(args)
    reports = store.load_stage_reports()
    if not reports:
        print("no stage reports stored; run the pipeline first", file=sys.stderr)
        return 1
    print(stage_table_text(reports))
    paths = write_stage_report_files(reports, args.out_dir)
    for path in paths:
        print(f"wrote {path}")
    return 0


def cmd_eval_grouping(args) -> int:
    records = json.loads(Path(args.dataset).read_text(encoding="utf-8"))
    adapter = load_config(args.config).make_adapter() if args.config else IdentityAdapter()
    groups = []
    for record in records:
        base = record["base_form"]
        forms = record["forms"]
        examples = record.get("examples", [])
        predictions = []
        for form in forms:
            if args.mode == "context" and examples:
                votes = [adapter.lemmatize_in_context(form, ex) for ex in examples[:5]]
                counts = {}
                for v in votes:
                    counts[v] = counts.get(v, 0) + 1
                lemma = min(counts, key=lambda v: (-counts[v], v))
            else:
                lemma = adapter.lemmatize(form)
            predictions.append((form, lemma))
        groups.append((base, predictions))
    report = compute_group_accuracy(groups)
    print(json.dumps(report.to_json(), ensure_ascii=False, indent=2))
    return 0


def cmd_eval_definitions(args) -> int:
    config = load_config(args.config)
    records = json.loads(Path(args.dataset).read_text(encoding="utf-8"))
    dataset = [
        {
            "neologism": r.get("neologism") or r["base_form"],
            "reference_definition": r.get("reference_definition") or r["definition"],
            "examples": r["examples"],
        }
        for r in records
    ]
    shots_list = [int(s) for s in args.shots.split(",")]
    report = run_definition_evaluation(
        dataset,
        generator_client=config.make_llm_client(),
        judge_client=config.make_judge_client(),
        shots_list=shots_list,
        seed=args.seed,
    )
    print(json.dumps(report.to_json(), ensure_ascii=False, indent=2))
    return 0


def cmd_eval_categories(args) -> int:
    config = load_config(args.config)
    client = config.make_llm_client()
    records = json.loads(Path(args.dataset).read_text(encoding="utf-8"))
    results = {}
    for dimension, labels in (("sentiment", SENTIMENT_LABELS), ("domain", DOMAIN_LABELS)):
        gold, predicted = [], []
        for record in records:
            if dimension not in record:
                continue
            word = record.get("neologism") or record["base_form"]
            definition = None
            if args.setup in ("definition", "both"):
                from .llm import Definition
                from datetime import datetime, timezone

                definition = Definition(
                    neologism=word, text=record["definition"], shots=0,
                    examples_used=(), model_name="reference",
                    created_at=datetime.now(timezone.utc),
                )
            label = categorize(
                word, args.setup, record.get("examples", []), definition, dimension, client
            )
            predicted.append(label.value)
            gold.append(record[dimension])
        if gold:
            results[dimension] = compute_categorization(predicted, gold, labels)
    print(render_categorization_table(results))
    print(json.dumps({k: v.to_json() for k, v in results.items()},
                     ensure_ascii=False, indent=2))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.api import create_app

    config = load_config(args.config) if args.config else None
    store = Store(args.store or (config.store_path if config else "neolog.db"))
    lexicons = config.load_lexicons() if config else None
    llm_client = config.make_llm_client() if config else None
    static_dir = args.static if args.static and Path(args.static).is_dir() else None
    app = create_app(
        store,
        llm_client=llm_client,
        lexicons=lexicons,
        exemplars=config.exemplars if config else None,
        static_dir=static_dir,
    )
    host, _, port = args.addr.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def cmd_export(args) -> int:
    store = _store_from(args)
    groups = []
    for group, survived, decisions in store.all_groups():
        if args.status and group.review_status != args.status:
            continue
        if args.survivors_only and not survived:
            continue
        groups.append(group)
    data = export_csv(groups)
    Path(args.out).write_bytes(data)
    print(f"wrote {len(groups)} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neolog")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="poll feeds and store new documents")
    p.add_argument("--feeds", required=True, help="file with one feed URL per line")
    p.add_argument("--store", help="store database path")
    p.add_argument("--config", help="config file (for the store path)")
    p.set_defaults(func=cmd_ingest)

    pipeline = sub.add_parser("pipeline", help="pipeline operations")
    pipeline_sub = pipeline.add_subparsers(dest="pipeline_command", required=True)
    p = pipeline_sub.add_parser("run", help="analyze stored documents and filter candidates")
    p.add_argument("--config", required=True)
    p.add_argument("--gold", help="gold file: one base form per line")
    p.set_defaults(func=cmd_pipeline_run)

    report = sub.add_parser("report", help="render stored reports")
    report_sub = report.add_subparsers(dest="report_command", required=True)
    p = report_sub.add_parser("stages", help="stage survivor table, CSV and figure")
    p.add_argument("--store", help="store database path")
    p.add_argument("--config", help="config file (for the store path)")
    p.add_argument("--out-dir", default="reports")
    p.set_defaults(func=cmd_report_stages)

    evaluation = sub.add_parser("eval", help="evaluation harnesses")
    eval_sub = evaluation.add_subparsers(dest="eval_command", required=True)

    p = eval_sub.add_parser("grouping", help="group-consistency metrics for a lemmatizer")
    p.add_argument("--dataset", required=True, help="JSON: [{base_form, forms, examples}]")
    p.add_argument("--mode", choices=["context", "isolated"], default="isolated")
    p.add_argument("--config", help="config file (for the analyzer adapter)")
    p.set_defaults(func=cmd_eval_grouping)

    p = eval_sub.add_parser("definitions", help="definition generation + judge evaluation")
    p.add_argument("--dataset", required=True)
    p.add_argument("--shots", default="0,3,5")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_eval_definitions)

    p = eval_sub.add_parser("categories", help="sentiment/domain categorization evaluation")
    p.add_argument("--dataset", required=True)
    p.add_argument("--setup", choices=["examples", "definition", "both"], default="examples")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_eval_categories)

    p = sub.add_parser("serve", help="run the review HTTP API")
    p.add_argument("--addr", default="127.0.0.1:8100", help="HOST:PORT")
    p.add_argument("--config")
    p.add_argument("--store")
    p.add_argument("--static", help="directory with the built review UI")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export", help="write the candidate CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--store")
    p.add_argument("--config")
    p.add_argument("--status", choices=["pending", "accepted", "rejected"])
    p.add_argument("--survivors-only", action="store_true")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
