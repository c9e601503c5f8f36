import json
from datetime import datetime, timezone

import pytest

from neolog.cli import main
from neolog.ingest import Document
from neolog.service.store import Store

T0 = datetime(2024, 5, 1, 9, 0, tzinfo=timezone.utc)

PL_TEXT = (
    "Wczoraj wieczorem wszyscy mówili, że sepulka zmienia nasze codzienne życie. "
    "Moja sąsiadka twierdzi, że sepulka widać teraz na każdym rogu ulicy."
)


def write_workspace(tmp_path, llm_responses=None):
    (tmp_path / "dictionary.txt").write_text(
        "\n".join([
            "wczoraj", "wieczorem", "wszyscy", "mówili", "że", "zmienia",
            "nasze", "codzienne", "życie", "moja", "sąsiadka", "twierdzi",
            "widać", "teraz", "na", "każdym", "rogu", "ulicy",
        ]) + "\n",
        encoding="utf-8",
    )
    (tmp_path / "english.txt").write_text("the\nkeyboard\n", encoding="utf-8")
    (tmp_path / "nkjp.tsv").write_text("internauta\t100\n", encoding="utf-8")
    config = {
        "store": "workspace.db",
        "lexicons": {
            "dictionary": "dictionary.txt",
            "english": "english.txt",
            "references": {"nkjp": "nkjp.tsv"},
        },
        "filters": {
            "min_doc_freq": 2,
            "min_lowercase": 2,
            "min_non_ne": 2,
            "min_polish_contexts": 2,
            "enabled_references": ["nkjp"],
        },
    }
    import yaml

    (tmp_path / "neolog.yaml").write_text(yaml.safe_dump(config), encoding="utf-8")
    return tmp_path / "neolog.yaml"


def seed_documents(store_path, n=4):
    store = Store(store_path)
    docs = [
        Document(
            id=f"doc{i}",
            url=f"https://s{i % 2}.pl/a{i}",
            host_domain=f"s{i % 2}.pl",
            fetched_at=T0,
            language="pl",
            language_confidence=0.9,
            text=PL_TEXT,
        )
        for i in range(n)
    ]
    store.add_documents(docs)
    store.close()


def test_pipeline_run_and_report_and_export(tmp_path, capsys):
    config_path = write_workspace(tmp_path)
    seed_documents(tmp_path / "workspace.db")

    rc = main(["pipeline", "run", "--config", str(config_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "No filter" in out
    assert "sepulka" not in out  # table shows counts, not forms

    out_dir = tmp_path / "reports"
    rc = main([
        "report", "stages",
        "--store", str(tmp_path / "workspace.db"),
        "--out-dir", str(out_dir),
    ])
    assert rc == 0
    assert (out_dir / "stages.csv").exists()
    assert (out_dir / "stages.png").exists()
    # PNG magic header
    assert (out_dir / "stages.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    csv_text = (out_dir / "stages.csv").read_text(encoding="utf-8")
    assert csv_text.startswith("stage_label,remaining")

    export_path = tmp_path / "candidates.csv"
    rc = main(["export", "--out", str(export_path),
               "--store", str(tmp_path / "workspace.db")])
    assert rc == 0
    text = export_path.read_text(encoding="utf-8")
    assert text.startswith("base_form,")
    assert "sepulka" in text


def test_report_without_pipeline_fails(tmp_path, capsys):
    store_path = tmp_path / "empty.db"
    Store(store_path).close()
    rc = main(["report", "stages", "--store", str(store_path),
               "--out-dir", str(tmp_path / "r")])
    assert rc == 1


def test_eval_grouping_cli(tmp_path, capsys):
    dataset = [
        {"base_form": "metaverse",
         "forms": ["metaverse", "metaverses"],
         "examples": ["Metaverse is growing fast."]},
        {"base_form": "kot",
         "forms": ["kot", "kota"],
         "examples": []},
    ]
    path = tmp_path / "grouping.json"
    path.write_text(json.dumps(dataset, ensure_ascii=False), encoding="utf-8")
    rc = main(["eval", "grouping", "--dataset", str(path), "--mode", "isolated"])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    # identity lemmatizer: both groups consistent only if forms identical
    assert report["total_groups"] == 2
    assert report["consistent_groups"] == 0
    assert report["plain_accuracy"] == 0.5


def test_ingest_cli(tmp_path, capsys, monkeypatch):
    feeds = tmp_path / "feeds.txt"
    feeds.write_text("https://feed.example.pl/rss\n", encoding="utf-8")

    rss = (
        '<?xml version="1.0"?><rss version="2.0"><channel>'
        "<item><link>https://a.pl/1</link></item>"
        "</channel></rss>"
    ).encode()
    page = (
        "<html><body><article><p>"
        "Wczoraj wieczorem wszyscy mówili o nowym słowie, które zmienia życie."
        "</p></article></body></html>"
    ).encode()

    import neolog.ingest as ingest_module

    def fake_fetch(url):
        return rss if url.endswith("rss") else page

    monkeypatch.setattr(ingest_module, "default_fetcher", fake_fetch)
    rc = main(["ingest", "--feeds", str(feeds), "--store", str(tmp_path / "i.db")])
    assert rc == 0
    assert "ingested 1 new documents" in capsys.readouterr().out
    store = Store(tmp_path / "i.db")
    assert store.document_count() == 1
