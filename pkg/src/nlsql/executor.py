"""Run resolved SELECT statements read-only against an onboarded store.

Statements are whitelisted twice: the parser only accepts the SELECT
grammar, and the store connection is opened read-only so nothing mutating
can slip through. Results are capped to keep the UI responsive.
"""

from __future__ import annotations

import csv
import io
import sqlite3
from dataclasses import dataclass, field

from .errors import ExecutionError, RejectedStatement
from .onboarding import NUMERIC, TEXTUAL, OnboardedDatabase
from .sqlparser import DML, TERMINAL_LITERAL, WHITESPACE, parse, tokenize

DEFAULT_ROW_CAP = 10_000


@dataclass
class ResultTable:
    columns: list[tuple[str, str]] = field(default_factory=list)
    rows: list[tuple] = field(default_factory=list)
    row_count: int = 0
    truncated: bool = False

    def to_json(self) -> dict:
        return {
            "columns": [{"name": n, "data_type": t} for n, t in self.columns],
            "rows": [list(r) for r in self.rows],
            "row_count": self.row_count,
            "truncated": self.truncated,
        }


def _first_statement_token(sql: str):
    for token in tokenize(sql):
        if token.kind != WHITESPACE:
            return token
    return None


def _guess_type(db: OnboardedDatabase, tables: list[str], name: str, sample) -> str:
    for table in tables:
        meta = db.find_column(table, name)
        if meta is not None:
            return meta.data_type
    if isinstance(sample, (int, float)) and not isinstance(sample, bool):
        return NUMERIC
    return TEXTUAL


def execute(sql: str, db: OnboardedDatabase, row_cap: int = DEFAULT_ROW_CAP) -> ResultTable:
    """Run a SELECT against the store; anything else is rejected before a
    connection is even opened."""
    first = _first_statement_token(sql)
    if first is None or first.kind != DML or first.text.upper() != "SELECT":
        got = first.text if first else "empty statement"
        raise RejectedStatement(f"only SELECT statements are executed, got {got!r}")
    if TERMINAL_LITERAL in sql:
        raise RejectedStatement("statement still contains an unresolved 'Terminal' placeholder")
    parsed = parse(sql, db)  # second gate: full grammar + schema validation
    if db.store_path is None:
        raise ExecutionError("database has no materialized store")

    conn = None
    try:
        conn = sqlite3.connect(f"file:{db.store_path}?mode=ro", uri=True)
        cursor = conn.execute(sql)
        names = [d[0] for d in cursor.description] if cursor.description else []
        fetched = cursor.fetchmany(row_cap + 1)
    except sqlite3.Error as exc:
        raise ExecutionError(f"store failed: {exc}") from exc
    finally:
        if conn is not None:
            conn.close()

    truncated = len(fetched) > row_cap
    rows = [tuple(r) for r in fetched[:row_cap]]
    samples = {i: next((row[i] for row in rows if row[i] is not None), None) for i in range(len(names))}
    tables = parsed.tables
    columns = [(name, _guess_type(db, tables, name, samples[i])) for i, name in enumerate(names)]
    return ResultTable(columns=columns, rows=rows, row_count=len(rows), truncated=truncated)


def export_csv(result: ResultTable) -> bytes:
    """RFC 4180 bytes: header row first, \r\n line endings, UTF-8."""
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow([name for name, _ in result.columns])
    for row in result.rows:
        writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue().encode("utf-8")


class SqliteValueStore:
    """Distinct-value access for terminal resolution, pushed down to the store."""

    def __init__(self, db: OnboardedDatabase):
        self.db = db

    def distinct_values(self, table: str, column: str) -> list:
        if self.db.find_column(table, column) is None:
            return []
        conn = sqlite3.connect(f"file:{self.db.store_path}?mode=ro", uri=True)
        try:
            rows = conn.execute(
                f'SELECT DISTINCT "{table.lower()}"."{column.lower()}" FROM "{table.lower()}"'
            ).fetchall()
        except sqlite3.Error as exc:
            raise ExecutionError(f"store failed while indexing {table}.{column}: {exc}") from exc
        finally:
            conn.close()
        return [r[0] for r in rows if r[0] is not None]
