"""Durable registry for onboarded databases, search history, and the
write-through translation cache.

Everything lives under one data directory:

    data_dir/
      registry.sqlite          databases, history, translation_cache tables
      databases/<id>/store.sqlite
      databases/<id>/schema.json
"""

from __future__ import annotations

import datetime as dt
import json
import sqlite3
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import UnknownDatabase
from .onboarding import OnboardedDatabase, load_onboarded
from .translator import CandidateSql, QueryCacheKey

_SCHEMA = """
CREATE TABLE IF NOT EXISTS databases (
    id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS history (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    database_id TEXT NOT NULL,
    raw_query TEXT NOT NULL,
    normalized_query TEXT NOT NULL,
    resolved_sql TEXT NOT NULL,
    explanation TEXT NOT NULL,
    warnings TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS history_db_idx ON history (database_id, id);
CREATE TABLE IF NOT EXISTS translation_cache (
    database_id TEXT NOT NULL,
    normalized_query TEXT NOT NULL,
    sql TEXT NOT NULL,
    backend_id TEXT NOT NULL,
    PRIMARY KEY (database_id, normalized_query)
);
"""


@dataclass(frozen=True)
class HistoryEntry:
    id: int
    database_id: str
    raw_query: str
    normalized_query: str
    resolved_sql: str
    explanation: str
    timestamp: str
    warnings: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "database_id": self.database_id,
            "raw_query": self.raw_query,
            "normalized_query": self.normalized_query,
            "resolved_sql": self.resolved_sql,
            "explanation": self.explanation,
            "timestamp": self.timestamp,
            "warnings": list(self.warnings),
        }


@dataclass
class Registry:
    data_dir: Path
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _loaded: dict = field(default_factory=dict, repr=False)
    _last_ts: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        (self.data_dir / "databases").mkdir(exist_ok=True)
        with self._connect() as conn:
            conn.executescript(_SCHEMA)

    def _connect(self) -> sqlite3.Connection:
        return sqlite3.connect(self.data_dir / "registry.sqlite")

    def database_dir(self, database_id: str) -> Path:
        return self.data_dir / "databases" / database_id

    def register(self, db: OnboardedDatabase, name: str) -> None:
        with self._lock, self._connect() as conn:
            existing = conn.execute("SELECT 1 FROM databases WHERE id = ?", (db.id,)).fetchone()
            if existing:
                raise ValueError(f"database id {db.id!r} already registered")
            conn.execute(
                "INSERT INTO databases (id, name, created_at) VALUES (?, ?, ?)",
                (db.id, name, db.created_at),
            )
        self._loaded[db.id] = db

    def list_databases(self) -> list[dict]:
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT id, name, created_at FROM databases ORDER BY created_at, id"
            ).fetchall()
        out = []
        for db_id, name, created in rows:
            db = self.get(db_id)
            out.append(
                {
                    "id": db_id,
                    "name": name,
                    "created_at": created,
                    "tables": [t.name for t in db.tables],
                    "display_names": db.display_names(),
                }
            )
        return out

    def get(self, database_id: str) -> OnboardedDatabase:
        db = self._loaded.get(database_id)
        if db is not None:
            return db
        with self._connect() as conn:
            row = conn.execute("SELECT id FROM databases WHERE id = ?", (database_id,)).fetchone()
        if row is None:
            raise UnknownDatabase(f"no onboarded database with id {database_id!r}")
        db = load_onboarded(self.database_dir(database_id), database_id)
        self._loaded[database_id] = db
        return db

    # -- history -----------------------------------------------------------

    def append_history(
        self,
        database_id: str,
        raw_query: str,
        normalized_query: str,
        resolved_sql: str,
        explanation: str,
        warnings: list[str],
    ) -> HistoryEntry:
        with self._lock:
            now = dt.datetime.now(dt.timezone.utc)
            last = self._last_ts.get(database_id)
            if last is not None and now < last:
                now = last  # keep per-database timestamps monotone in-process
            self._last_ts[database_id] = now
            stamp = now.isoformat()
            with self._connect() as conn:
                cursor = conn.execute(
                    "INSERT INTO history (database_id, raw_query, normalized_query, "
                    "resolved_sql, explanation, warnings, created_at) VALUES (?, ?, ?, ?, ?, ?, ?)",
                    (database_id, raw_query, normalized_query, resolved_sql,
                     explanation, json.dumps(warnings), stamp),
                )
                entry_id = cursor.lastrowid
        return HistoryEntry(
            id=entry_id,
            database_id=database_id,
            raw_query=raw_query,
            normalized_query=normalized_query,
            resolved_sql=resolved_sql,
            explanation=explanation,
            timestamp=stamp,
            warnings=tuple(warnings),
        )

    def history_page(self, database_id: str, page: int = 1, per_page: int = 20) -> list[HistoryEntry]:
        """Newest first; pages beyond the end are empty, not errors."""
        self.get(database_id)  # raises UnknownDatabase for unregistered ids
        offset = (max(page, 1) - 1) * per_page
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT id, database_id, raw_query, normalized_query, resolved_sql, "
                "explanation, warnings, created_at FROM history WHERE database_id = ? "
                "ORDER BY id DESC LIMIT ? OFFSET ?",
                (database_id, per_page, offset),
            ).fetchall()
        return [
            HistoryEntry(
                id=r[0], database_id=r[1], raw_query=r[2], normalized_query=r[3],
                resolved_sql=r[4], explanation=r[5], timestamp=r[7],
                warnings=tuple(json.loads(r[6])),
            )
            for r in rows
        ]

    # -- translation cache persistence --------------------------------------

    def cache_put(self, key: QueryCacheKey, candidate: CandidateSql) -> None:
        with self._lock, self._connect() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO translation_cache "
                "(database_id, normalized_query, sql, backend_id) VALUES (?, ?, ?, ?)",
                (key.database_id, key.normalized_text, candidate.sql, candidate.backend_id),
            )

    def cache_get(self, key: QueryCacheKey) -> Optional[CandidateSql]:
        with self._connect() as conn:
            row = conn.execute(
                "SELECT sql, backend_id FROM translation_cache "
                "WHERE database_id = ? AND normalized_query = ?",
                (key.database_id, key.normalized_text),
            ).fetchone()
        if row is None:
            return None
        return CandidateSql(sql=row[0], backend_id=row[1], from_cache=True)
