from datetime import datetime, timezone

import pytest

from neolog.ingest import (
    Document,
    FeedSource,
    IngestError,
    canonical_url,
    document_id,
    extract_main_content,
    make_document,
    poll_feeds,
    registrable_domain,
)
from neolog.langid import detect_language

PL_PARAGRAPH = (
    "Wczoraj poszliśmy do sklepu po zakupy na cały tydzień. "
    "Kupiliśmy chleb, masło i kilka innych potrzebnych rzeczy."
)


def rss(items):
    entries = "".join(
        f"<item><title>t</title><link>{link}</link></item>" for link in items
    )
    return f'<?xml version="1.0"?><rss version="2.0"><channel>{entries}</channel></rss>'.encode()


def page(paragraphs):
    body = "".join(f"<p>{p}</p>" for p in paragraphs)
    return f"<html><body><article>{body}</article></body></html>".encode()


class TestExtractMainContent:
    def test_script_stripped(self):
        html = b"<html><body><p>Ala ma kota.</p><script>x()</script></body></html>"
        assert extract_main_content(html) == "Ala ma kota."

    def test_two_paragraphs_newline_separated(self):
        html = page(["Pierwszy akapit artykulu.", "Drugi akapit artykulu."])
        assert extract_main_content(html) == "Pierwszy akapit artykulu.\nDrugi akapit artykulu."

    def test_empty_body(self):
        assert extract_main_content(b"<html><body></body></html>") == ""

    def test_navigation_boilerplate_excluded(self):
        html = (
            b"<html><body>"
            b"<nav><a href='/'>Home</a><a href='/x'>News</a></nav>"
            b"<article><p>To jest najwazniejsza tresc strony o kotach domowych.</p>"
            b"<p>Drugi dlugi akapit tej samej tresci artykulu prasowego.</p></article>"
            b"<footer>Kontakt | Regulamin</footer>"
            b"</body></html>"
        )
        text = extract_main_content(html)
        assert "najwazniejsza tresc" in text
        assert "Home" not in text
        assert "Regulamin" not in text

    def test_no_residual_tags(self):
        import re

        html = page(["Akapit <b>pogrubiony</b> i <i>kursywa</i> tekstu.", "Kolejny."])
        text = extract_main_content(html)
        assert not re.search(r"<[A-Za-z]", text)

    def test_undecodable_input_raises(self):
        with pytest.raises(IngestError):
            extract_main_content(b"\xff\xfe<html>\xff</html>")


class TestDetectLanguage:
    def test_polish(self):
        code, conf = detect_language("Wczoraj poszliśmy do sklepu po zakupy na cały tydzień.")
        assert code == "pl"
        assert conf >= 0.8

    def test_english(self):
        code, conf = detect_language(
            "The quick brown fox jumps over the lazy dog near the river."
        )
        assert code == "en"
        assert conf >= 0.8

    def test_below_minimum_length(self):
        assert detect_language("abc") == ("und", 0.0)

    def test_deterministic(self):
        text = "Dzisiaj rano wypiłem kawę i przeczytałem gazetę przed pracą."
        assert detect_language(text) == detect_language(text)


class TestDocumentIdentity:
    def test_id_deterministic_in_url_and_text(self):
        a = document_id("https://Example.pl/x/", "tekst")
        b = document_id("https://example.pl/x", "tekst")
        assert a == b
        assert document_id("https://example.pl/x", "inny") != a

    def test_canonical_url(self):
        assert canonical_url("HTTPS://Example.PL:443/a/#frag") == "https://example.pl/a"

    def test_registrable_domain(self):
        assert registrable_domain("https://www.example.pl/x") == "example.pl"
        assert registrable_domain("https://news.bbc.co.uk/y") == "bbc.co.uk"

    def test_make_document_fields(self):
        d = make_document("https://example.pl/a", PL_PARAGRAPH)
        assert d.language == "pl"
        assert d.host_domain == "example.pl"
        assert "<" not in d.text

    def test_json_round_trip(self):
        d = make_document(
            "https://example.pl/a",
            PL_PARAGRAPH,
            fetched_at=datetime(2024, 5, 1, 12, 0, tzinfo=timezone.utc),
        )
        assert Document.from_json(d.to_json()) == d


class TestPollFeeds:
    def fetcher(self, pages):
        def fetch(url):
            if url not in pages:
                raise IOError(f"404 {url}")
            return pages[url]

        return fetch

    def test_three_new_items(self):
        pages = {
            "https://feed.pl/rss": rss(
                ["https://a.pl/1", "https://a.pl/2", "https://a.pl/3"]
            ),
            "https://a.pl/1": page([PL_PARAGRAPH]),
            "https://a.pl/2": page([PL_PARAGRAPH + " Jeszcze jedno zdanie."]),
            "https://a.pl/3": page(["Zupełnie inna treść trzeciego artykułu o pogodzie."]),
        }
        result = poll_feeds([FeedSource("https://feed.pl/rss")], self.fetcher(pages))
        assert len(result.documents) == 3
        assert result.errors == []

    def test_second_poll_yields_nothing(self):
        pages = {
            "https://feed.pl/rss": rss(["https://a.pl/1"]),
            "https://a.pl/1": page([PL_PARAGRAPH]),
        }
        seen = set()
        first = poll_feeds([FeedSource("https://feed.pl/rss")], self.fetcher(pages), seen)
        second = poll_feeds([FeedSource("https://feed.pl/rss")], self.fetcher(pages), seen)
        assert len(first.documents) == 1
        assert second.documents == []

    def test_unreachable_feed_recorded(self):
        pages = {
            "https://ok.pl/rss": rss(["https://a.pl/1"]),
            "https://a.pl/1": page([PL_PARAGRAPH]),
        }
        result = poll_feeds(
            [FeedSource("https://ok.pl/rss"), FeedSource("https://down.pl/rss")],
            self.fetcher(pages),
        )
        assert len(result.documents) == 1
        assert len(result.errors) == 1
        assert result.errors[0][0] == "https://down.pl/rss"

    def test_empty_page_dropped(self):
        pages = {
            "https://feed.pl/rss": rss(["https://a.pl/empty"]),
            "https://a.pl/empty": b"<html><body></body></html>",
        }
        result = poll_feeds([FeedSource("https://feed.pl/rss")], self.fetcher(pages))
        assert result.documents == []
        assert result.dropped == ["https://a.pl/empty"]

    def test_no_enabled_sources(self):
        with pytest.raises(IngestError):
            poll_feeds([FeedSource("https://x.pl/rss", enabled=False)], self.fetcher({}))

    def test_invalid_source(self):
        with pytest.raises(IngestError):
            FeedSource("not-a-url")
        with pytest.raises(IngestError):
            FeedSource("https://x.pl/rss", poll_interval=5)
