import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from nlsql.errors import BackendUnavailable, NoTranslation
from nlsql.temporal import normalize_query
from nlsql.translator import (
    CachedTranslator,
    CandidateSql,
    FixtureTranslator,
    QueryCacheKey,
    RemoteTranslator,
)

import datetime as dt

REF = dt.date(2021, 7, 15)


def nq(text: str):
    return normalize_query(text, REF)


class CountingTranslator:
    backend_id = "stub"

    def __init__(self, sql="SELECT a.x FROM a", fail_times=0):
        self.calls = 0
        self.sql = sql
        self.fail_times = fail_times

    def translate(self, query, schema):
        self.calls += 1
        if self.calls <= self.fail_times:
            raise BackendUnavailable("down")
        return CandidateSql(sql=self.sql, backend_id=self.backend_id)


class TestFixtureTranslator:
    def test_exact_pattern_lookup(self, customer_db):
        translator = FixtureTranslator(entries=[
            {"pattern": "What are the email addresses of the customer whose first name is MARY?",
             "sql": "SELECT customer.email FROM customer WHERE customer.first_name = 'Terminal'"},
        ])
        out = translator.translate(
            nq("What are the email addresses of the customer whose first name is MARY?"),
            customer_db,
        )
        assert out.sql.endswith("'Terminal'")
        assert out.backend_id == "fixture"
        assert out.from_cache is False

    def test_miss_raises_no_translation(self, customer_db):
        with pytest.raises(NoTranslation) as exc:
            FixtureTranslator(entries=[]).translate(nq("anything"), customer_db)
        assert "check the query" in str(exc.value)

    def test_loads_from_file(self, tmp_path, customer_db):
        path = tmp_path / "fixtures.json"
        path.write_text(json.dumps([{"pattern": "q", "sql": "SELECT a.x FROM a"}]))
        out = FixtureTranslator(path=path).translate(nq("q"), customer_db)
        assert out.sql == "SELECT a.x FROM a"


class _EchoHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        assert self.path == "/translate"
        payload = json.dumps({"sql": f"SELECT a.x FROM a WHERE a.q = '{body['query'][:10]}'"})
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(payload.encode())

    def log_message(self, *args):
        pass


class TestRemoteTranslator:
    def test_loopback_server(self, customer_db):
        server = HTTPServer(("127.0.0.1", 0), _EchoHandler)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            translator = RemoteTranslator(f"http://127.0.0.1:{server.server_port}")
            out = translator.translate(nq("list things"), customer_db)
            assert out.backend_id == "remote"
            assert out.sql.startswith("SELECT")
        finally:
            server.shutdown()

    def test_unreachable_backend(self, customer_db):
        translator = RemoteTranslator("http://127.0.0.1:1", timeout=0.2)
        with pytest.raises(BackendUnavailable):
            translator.translate(nq("x"), customer_db)


class TestCachedTranslator:
    def _key(self, text, db_id="db1"):
        return QueryCacheKey(database_id=db_id, normalized_text=nq(text).normalized)

    def test_second_call_hits_cache(self, customer_db):
        inner = CountingTranslator()
        cached = CachedTranslator(inner)
        first = cached.translate_cached(self._key("q"), nq("q"), customer_db)
        second = cached.translate_cached(self._key("q"), nq("q"), customer_db)
        assert inner.calls == 1
        assert first.from_cache is False and second.from_cache is True
        assert first.sql == second.sql

    def test_distinct_database_ids_miss(self, customer_db):
        inner = CountingTranslator()
        cached = CachedTranslator(inner)
        cached.translate_cached(self._key("q", "db1"), nq("q"), customer_db)
        cached.translate_cached(self._key("q", "db2"), nq("q"), customer_db)
        assert inner.calls == 2

    def test_errors_not_cached(self, customer_db):
        inner = CountingTranslator(fail_times=1)
        cached = CachedTranslator(inner)
        with pytest.raises(BackendUnavailable):
            cached.translate_cached(self._key("q"), nq("q"), customer_db)
        out = cached.translate_cached(self._key("q"), nq("q"), customer_db)
        assert inner.calls == 2
        assert out.from_cache is False

    def test_single_flight_under_concurrency(self, customer_db):
        class SlowTranslator(CountingTranslator):
            gate = threading.Event()

            def translate(self, query, schema):
                self.gate.wait(0.5)
                return super().translate(query, schema)

        inner = SlowTranslator()
        cached = CachedTranslator(inner)
        results = []
        key = self._key("concurrent")

        def worker():
            results.append(cached.translate_cached(key, nq("concurrent"), customer_db))

        threads = [threading.Thread(target=worker) for _ in range(6)]
        for t in threads:
            t.start()
        inner.gate.set()
        for t in threads:
            t.join()
        assert inner.calls == 1
        assert len({r.sql for r in results}) == 1
        assert sum(1 for r in results if not r.from_cache) == 1

    def test_write_through_persistence(self, customer_db):
        stored = {}
        inner = CountingTranslator()
        cached = CachedTranslator(inner, persist=stored.__setitem__, lookup=stored.get)
        key = self._key("persisted")
        cached.translate_cached(key, nq("persisted"), customer_db)
        assert key in stored
        # A fresh cache (new process) finds the persisted entry without the backend.
        inner2 = CountingTranslator()
        cached2 = CachedTranslator(inner2, persist=stored.__setitem__, lookup=stored.get)
        out = cached2.translate_cached(key, nq("persisted"), customer_db)
        assert inner2.calls == 0
        assert out.from_cache is True

    def test_cache_transparency(self, customer_db):
        inner = CountingTranslator(sql="SELECT b.y FROM b")
        cached = CachedTranslator(inner)
        key = self._key("transparent")
        uncached = cached.translate_cached(key, nq("transparent"), customer_db)
        hit = cached.translate_cached(key, nq("transparent"), customer_db)
        assert uncached.sql == hit.sql == "SELECT b.y FROM b"
