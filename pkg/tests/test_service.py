import csv
import datetime as dt
import io
import json

import pytest
from fastapi.testclient import TestClient

from nlsql.errors import UnknownDatabase, UnknownResult
from nlsql.service import QueryService, create_app
from nlsql.translator import FixtureTranslator

from conftest import write_csv

MARY_Q = "What are the email addresses of the customer whose first name is MARY?"
MARY_SQL_T = "SELECT customer.email FROM customer WHERE customer.first_name = 'Terminal'"
MARY_SQL = "SELECT customer.email FROM customer WHERE customer.first_name = 'MARY'"


class CountingFixture(FixtureTranslator):
    def __init__(self, entries):
        super().__init__(entries=entries)
        self.calls = 0

    def translate(self, query, schema):
        self.calls += 1
        return super().translate(query, schema)


@pytest.fixture()
def service(tmp_path):
    translator = CountingFixture([
        {"pattern": MARY_Q, "sql": MARY_SQL_T},
        {"pattern": "How many customers are there?",
         "sql": "SELECT COUNT(*) FROM customer"},
        {"pattern": "revenue by region",
         "sql": "SELECT sales.region, sales.revenue FROM sales"},
    ])
    svc = QueryService(tmp_path / "data", translator)
    svc.translator_stub = translator
    return svc


@pytest.fixture()
def customer_source(tmp_path):
    return write_csv(
        tmp_path / "customer.csv",
        ["email", "first_name"],
        [["mary.smith@example.com", "MARY"], ["john.doe@example.com", "JOHN"]],
    )


@pytest.fixture()
def sales_source(tmp_path):
    return write_csv(
        tmp_path / "sales.csv",
        ["region", "revenue"],
        [["north", "120.5"], ["south", "80.0"], ["north", "95.25"], ["east", "132.0"]],
    )


class TestQueryService:
    def test_end_to_end_mary(self, service, customer_source):
        db = service.onboard(customer_source)
        response = service.query(db.id, MARY_Q)
        assert response.sql == MARY_SQL
        assert response.explanation == (
            "Column(s): customer.email Table(s): customer, "
            "Filtered on: customer.first_name = 'MARY'"
        )
        assert response.result.rows == [("mary.smith@example.com",)]
        assert response.warnings == []
        assert response.from_cache is False

    def test_repeat_query_hits_cache(self, service, customer_source):
        db = service.onboard(customer_source)
        service.query(db.id, MARY_Q)
        again = service.query(db.id, MARY_Q)
        assert again.from_cache is True
        assert service.translator_stub.calls == 1
        assert again.sql == MARY_SQL

    def test_unknown_database(self, service):
        with pytest.raises(UnknownDatabase):
            service.query("missing", MARY_Q)

    def test_history_appends_one_entry_per_query(self, service, customer_source):
        db = service.onboard(customer_source)
        service.query(db.id, MARY_Q)
        service.query(db.id, "How many customers are there?")
        entries = service.history(db.id)
        assert len(entries) == 2
        assert entries[0].raw_query == "How many customers are there?"  # newest first
        assert entries[1].raw_query == MARY_Q
        assert entries[0].timestamp >= entries[1].timestamp

    def test_history_pagination(self, service, customer_source):
        db = service.onboard(customer_source)
        for _ in range(3):
            service.query(db.id, MARY_Q)
        assert len(service.history(db.id, page=1, per_page=2)) == 2
        assert len(service.history(db.id, page=2, per_page=2)) == 1
        assert service.history(db.id, page=9, per_page=2) == []

    def test_fresh_database_history_empty(self, service, customer_source):
        db = service.onboard(customer_source)
        assert service.history(db.id) == []

    def test_visualizations_ranked(self, service, sales_source):
        db = service.onboard(sales_source)
        response = service.query(db.id, "revenue by region")
        assert response.visualizations
        specs = response.visualizations
        assert specs == service.result_visualizations(response.result_id)
        assert all(set(s) == {"type", "x", "y", "aggregate", "score"} for s in specs)

    def test_csv_download_round_trip(self, service, customer_source):
        db = service.onboard(customer_source)
        response = service.query(db.id, MARY_Q)
        payload = service.result_csv(response.result_id).decode("utf-8")
        parsed = list(csv.reader(io.StringIO(payload)))
        assert parsed == [["email"], ["mary.smith@example.com"]]

    def test_result_ttl_expiry(self, tmp_path, customer_source):
        fake_now = [dt.datetime(2021, 7, 15, tzinfo=dt.timezone.utc)]
        svc = QueryService(
            tmp_path / "data2",
            FixtureTranslator([{"pattern": MARY_Q, "sql": MARY_SQL_T}]),
            clock=lambda: fake_now[0],
        )
        db = svc.onboard(customer_source)
        rid = svc.query(db.id, MARY_Q).result_id
        fake_now[0] += dt.timedelta(hours=2)
        with pytest.raises(UnknownResult):
            svc.result_csv(rid)

    def test_cache_survives_restart(self, tmp_path, customer_source):
        data_dir = tmp_path / "persist"
        first = QueryService(data_dir, CountingFixture([{"pattern": MARY_Q, "sql": MARY_SQL_T}]))
        db = first.onboard(customer_source)
        first.query(db.id, MARY_Q)

        second_stub = CountingFixture([{"pattern": MARY_Q, "sql": MARY_SQL_T}])
        second = QueryService(data_dir, second_stub)
        response = second.query(db.id, MARY_Q)
        assert second_stub.calls == 0
        assert response.from_cache is True
        assert response.sql == MARY_SQL

    def test_unresolved_terminal_skips_execution(self, tmp_path):
        source = write_csv(
            tmp_path / "quakes.csv",
            ["place", "longitude"],
            [["Colorado", "-105.5"], ["Alaska", "-150.2"]],
        )
        question = "Which places had a positive longitude value?"
        svc = QueryService(
            tmp_path / "data3",
            FixtureTranslator([{
                "pattern": question,
                "sql": "SELECT DISTINCT quakes.place FROM quakes WHERE quakes.longitude = 'Terminal'",
            }]),
        )
        db = svc.onboard(source)
        response = svc.query(db.id, question)
        assert "'Terminal'" in response.sql
        assert response.result is None and response.result_id is None
        assert len(response.warnings) == 1
        svc_history = svc.history(db.id)
        assert len(svc_history) == 1  # still recorded


class TestHttpApi:
    @pytest.fixture()
    def client(self, service):
        return TestClient(create_app(service))

    def test_upload_and_query(self, client, customer_source):
        with open(customer_source, "rb") as fh:
            upload = client.post(
                "/databases",
                files={"file": ("customer.csv", fh, "text/csv")},
                data={"config": "{}", "name": "customers"},
            )
        assert upload.status_code == 201
        body = upload.json()
        assert body["status"] == "ready"
        db_id = body["id"]

        listing = client.get("/databases").json()["databases"]
        assert any(d["id"] == db_id for d in listing)

        response = client.post(f"/databases/{db_id}/query", json={"query": MARY_Q})
        assert response.status_code == 200
        doc = response.json()
        assert doc["sql"] == MARY_SQL
        assert doc["result"]["rows"] == [["mary.smith@example.com"]]
        assert doc["from_cache"] is False

        history = client.get(f"/databases/{db_id}/history").json()["entries"]
        assert len(history) == 1

        csv_response = client.get(f"/results/{doc['result_id']}/csv")
        assert csv_response.status_code == 200
        assert csv_response.headers["content-type"].startswith("text/csv")
        assert csv_response.text.splitlines()[0] == "email"

        viz_response = client.get(f"/results/{doc['result_id']}/visualizations")
        assert viz_response.status_code == 200

    def test_error_shape(self, client):
        response = client.post("/databases/nope/query", json={"query": "x"})
        assert response.status_code == 404
        body = response.json()
        assert set(body) == {"error", "kind"}
        assert body["kind"] == "unknown_database"

    def test_translation_miss_is_422_with_hint(self, client, customer_source):
        db_id = None
        with open(customer_source, "rb") as fh:
            db_id = client.post(
                "/databases", files={"file": ("customer.csv", fh, "text/csv")}
            ).json()["id"]
        response = client.post(f"/databases/{db_id}/query", json={"query": "gibberish request"})
        assert response.status_code == 422
        assert "check the query" in response.json()["error"]

    def test_reference_time_override(self, tmp_path, sales_source):
        svc = QueryService(
            tmp_path / "data4",
            FixtureTranslator([{
                "pattern": "revenue Month: June, Year: 2021",
                "sql": "SELECT sales.revenue FROM sales",
            }]),
        )
        db = svc.onboard(sales_source)
        client = TestClient(create_app(svc))
        response = client.post(
            f"/databases/{db.id}/query",
            json={"query": "revenue last month", "reference_time": "2021-07-15T00:00:00"},
        )
        assert response.status_code == 200

    def test_expired_result_404(self, client):
        response = client.get("/results/deadbeef/csv")
        assert response.status_code == 404
        assert response.json()["kind"] == "unknown_result"
