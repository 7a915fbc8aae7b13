"""End-to-end orchestration and the HTTP facade.

The query pipeline: normalize temporal phrases -> translate (through the
single-flight cache) -> parse -> resolve Terminal placeholders -> execute ->
explain -> enumerate and rank visualizations. Resolution warnings degrade
gracefully: when a placeholder stays unresolved the response still carries
the SQL, the explanation and the warnings, but nothing is executed.
"""

from __future__ import annotations

import datetime as dt
import json as _json
import tempfile
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.responses import JSONResponse, Response

from .errors import (
    BackendUnavailable,
    ExecutionError,
    NlsqlError,
    NoCandidates,
    NoTranslation,
    OnboardingError,
    RejectedStatement,
    UnknownDatabase,
    UnknownIdentifier,
    UnknownResult,
    UnsupportedSyntax,
)
from .executor import DEFAULT_ROW_CAP, ResultTable, SqliteValueStore, execute, export_csv
from .explain import explain
from .onboarding import OnboardedDatabase, OnboardingConfig, onboard_database
from .resolver import ValueIndexCache, resolve
from .sqlparser import parse
from .storage import HistoryEntry, Registry
from .temporal import normalize_query
from .translator import CachedTranslator, QueryCacheKey, Translator
from .viz import DiversifiedConfig, enumerate_candidates, rank

RESULT_TTL_SECONDS = 3600.0


@dataclass
class QueryResponse:
    sql: str
    explanation: str
    warnings: list[str]
    from_cache: bool
    result: Optional[ResultTable] = None
    result_id: Optional[str] = None
    visualizations: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "sql": self.sql,
            "explanation": self.explanation,
            "warnings": list(self.warnings),
            "from_cache": self.from_cache,
            "result": self.result.to_json() if self.result else None,
            "result_id": self.result_id,
            "visualizations": list(self.visualizations),
        }


@dataclass
class _StoredResult:
    expires_at: float
    table: ResultTable
    visualizations: list[dict]


class QueryService:
    """Owns the registry, the translator cache, and per-database locks."""

    def __init__(
        self,
        data_dir: Path | str,
        translator: Translator,
        viz_approach: str = "partial_order",
        viz_config: Optional[DiversifiedConfig] = None,
        row_cap: int = DEFAULT_ROW_CAP,
        result_ttl: float = RESULT_TTL_SECONDS,
        clock=None,
    ):
        self.registry = Registry(Path(data_dir))
        self.translator = CachedTranslator(
            translator, persist=self.registry.cache_put, lookup=self.registry.cache_get
        )
        self.viz_approach = viz_approach
        self.viz_config = viz_config or DiversifiedConfig()
        self.row_cap = row_cap
        self.result_ttl = result_ttl
        self._clock = clock or (lambda: dt.datetime.now(dt.timezone.utc))
        self._results: dict[str, _StoredResult] = {}
        self._results_lock = threading.Lock()
        self._value_caches: dict[str, ValueIndexCache] = {}
        self._db_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- onboarding ----------------------------------------------------------

    def onboard(
        self,
        source: Path | str,
        config: Optional[OnboardingConfig] = None,
        name: Optional[str] = None,
    ) -> OnboardedDatabase:
        database_id = uuid.uuid4().hex[:12]
        with self._db_lock(database_id):
            db = onboard_database(
                source,
                config,
                dest_dir=self.registry.database_dir(database_id),
                database_id=database_id,
            )
            self.registry.register(db, name or Path(source).stem)
        return db

    def _db_lock(self, database_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._db_locks.setdefault(database_id, threading.Lock())

    def list_databases(self) -> list[dict]:
        return self.registry.list_databases()

    # -- the pipeline --------------------------------------------------------

    def query(
        self,
        database_id: str,
        text: str,
        reference_time: Optional[dt.datetime] = None,
    ) -> QueryResponse:
        db = self.registry.get(database_id)
        reference = reference_time or self._clock()
        normalized = normalize_query(text, reference)
        key = QueryCacheKey(database_id=database_id, normalized_text=normalized.normalized)
        candidate = self.translator.translate_cached(key, normalized, db)

        cache = self._value_caches.setdefault(database_id, ValueIndexCache(SqliteValueStore(db)))
        resolution = resolve(normalized, candidate, db, cache)
        explanation = explain(parse(resolution.sql, db)).render()

        result: Optional[ResultTable] = None
        result_id: Optional[str] = None
        specs: list[dict] = []
        if resolution.fully_resolved:
            result = execute(resolution.sql, db, row_cap=self.row_cap)
            try:
                ranked = rank(
                    enumerate_candidates(result),
                    approach=self.viz_approach,
                    config=self.viz_config,
                )
                specs = [node.spec() for node in ranked]
            except NoCandidates:
                specs = []
            result_id = uuid.uuid4().hex[:16]
            self._store_result(result_id, result, specs)

        self.registry.append_history(
            database_id,
            raw_query=text,
            normalized_query=normalized.normalized,
            resolved_sql=resolution.sql,
            explanation=explanation,
            warnings=resolution.warnings,
        )
        return QueryResponse(
            sql=resolution.sql,
            explanation=explanation,
            warnings=resolution.warnings,
            from_cache=candidate.from_cache,
            result=result,
            result_id=result_id,
            visualizations=specs,
        )

    def history(self, database_id: str, page: int = 1, per_page: int = 20) -> list[HistoryEntry]:
        return self.registry.history_page(database_id, page, per_page)

    # -- short-lived result store --------------------------------------------

    def _now_seconds(self) -> float:
        return self._clock().timestamp()

    def _store_result(self, result_id: str, table: ResultTable, specs: list[dict]) -> None:
        with self._results_lock:
            now = self._now_seconds()
            expired = [rid for rid, r in self._results.items() if r.expires_at <= now]
            for rid in expired:
                del self._results[rid]
            self._results[result_id] = _StoredResult(now + self.result_ttl, table, specs)

    def _get_result(self, result_id: str) -> _StoredResult:
        with self._results_lock:
            stored = self._results.get(result_id)
            if stored is None or stored.expires_at <= self._now_seconds():
                self._results.pop(result_id, None)
                raise UnknownResult(f"result {result_id!r} not found or expired; re-run the query")
        return stored

    def result_csv(self, result_id: str) -> bytes:
        return export_csv(self._get_result(result_id).table)

    def result_visualizations(self, result_id: str) -> list[dict]:
        return list(self._get_result(result_id).visualizations)


# ---------------------------------------------------------------------------
# HTTP facade
# ---------------------------------------------------------------------------

_STATUS_BY_ERROR = [
    (UnknownDatabase, 404),
    (UnknownResult, 404),
    (NoTranslation, 422),
    (BackendUnavailable, 503),
    (UnsupportedSyntax, 422),
    (UnknownIdentifier, 422),
    (RejectedStatement, 422),
    (OnboardingError, 400),
    (ExecutionError, 500),
]


def _status_for(exc: NlsqlError) -> int:
    for klass, status in _STATUS_BY_ERROR:
        if isinstance(exc, klass):
            return status
    return 500


def create_app(service: QueryService, ui_dir: Optional[Path | str] = None):
    """FastAPI app over a QueryService; errors come back as {"error", "kind"}.

    When ui_dir points at the built web UI (a directory with index.html), it
    is served from the same origin as the API.
    """
    app = FastAPI(title="nlsql", version="0.1.0")

    @app.exception_handler(NlsqlError)
    async def _nlsql_error(request: Request, exc: NlsqlError):
        return JSONResponse(status_code=_status_for(exc), content={"error": str(exc), "kind": exc.kind})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/databases", status_code=201)
    async def upload_database(
        file: UploadFile = File(...),
        config: str = Form("{}"),
        name: str = Form(""),
    ):
        try:
            parsed_config = OnboardingConfig.from_json(_json.loads(config))
        except (ValueError, TypeError) as exc:
            raise OnboardingError(f"bad onboarding config: {exc}")
        suffix = Path(file.filename or "upload.csv").suffix or ".csv"
        stem = Path(file.filename or "upload.csv").stem
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / f"{stem}{suffix}"
            path.write_bytes(await file.read())
            db = service.onboard(path, parsed_config, name=name or stem)
        return {"id": db.id, "status": "ready", "tables": [t.name for t in db.tables]}

    @app.get("/databases")
    def list_databases():
        return {"databases": service.list_databases()}

    @app.post("/databases/{database_id}/query")
    def run_query(database_id: str, body: dict):
        text = (body or {}).get("query", "")
        if not isinstance(text, str) or not text.strip():
            raise NoTranslation("empty query; please check the query again")
        reference = None
        raw_ref = (body or {}).get("reference_time")
        if raw_ref:
            reference = dt.datetime.fromisoformat(raw_ref)
        return service.query(database_id, text, reference_time=reference).to_json()

    @app.get("/databases/{database_id}/history")
    def history(database_id: str, page: int = 1):
        return {"entries": [e.to_json() for e in service.history(database_id, page=page)]}

    @app.get("/results/{result_id}/csv")
    def result_csv(result_id: str):
        payload = service.result_csv(result_id)
        return Response(
            content=payload,
            media_type="text/csv; charset=utf-8",
            headers={"Content-Disposition": f'attachment; filename="{result_id}.csv"'},
        )

    @app.get("/results/{result_id}/visualizations")
    def result_visualizations(result_id: str):
        return {"visualizations": service.result_visualizations(result_id)}

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
