"""One-time database registration.

Cleans identifiers into model-friendly English snake_case, concatenates
user-supplied synonyms onto column names, splits datetime columns into
day/month/year (plus short and long month names), and materializes the
result as a queryable SQLite store with a JSON schema sidecar recording
every rename.
"""

from __future__ import annotations

import calendar
import csv
import datetime as dt
import json
import re
import sqlite3
import uuid
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional

from .errors import AmbiguityError, FormatMismatch, OnboardingError

TEXTUAL = "textual"
NUMERIC = "numeric"
DATETIME = "datetime"

_CLEAN_RE = re.compile(r"[^a-z0-9]+")
_CLEANED_FORM_RE = re.compile(r"^[a-z0-9_]+$")
_INT_RE = re.compile(r"^-?\d+$")
_FLOAT_RE = re.compile(r"^-?\d+(\.\d+)?$")

SQLITE_MAGIC = b"SQLite format 3\x00"


def clean_identifier(name: str) -> str:
    """Normalize an identifier: lowercase, runs of non-alphanumerics become one
    underscore, leading/trailing underscores stripped.

    Raises OnboardingError when nothing alphanumeric survives.
    """
    if name is None or not name.strip():
        raise OnboardingError("identifier is empty")
    cleaned = _CLEAN_RE.sub("_", name.lower()).strip("_")
    if not cleaned:
        raise OnboardingError(f"identifier {name!r} has no alphanumeric content")
    return cleaned


@dataclass(frozen=True)
class ColumnMeta:
    """One column of an onboarded table.

    cleaned_name is the final identifier the model and the store see;
    original_name is what the source file called it.
    """

    original_name: str
    cleaned_name: str
    synonyms: tuple[str, ...] = ()
    data_type: str = TEXTUAL
    datetime_format: Optional[str] = None

    def __post_init__(self):
        if not _CLEANED_FORM_RE.match(self.cleaned_name):
            raise OnboardingError(f"cleaned name {self.cleaned_name!r} is not normalized")
        if (self.data_type == DATETIME) != (self.datetime_format is not None):
            raise OnboardingError(
                f"column {self.cleaned_name!r}: datetime_format must be present "
                f"exactly when data_type is datetime"
            )


@dataclass(frozen=True)
class TableMeta:
    name: str
    original_name: str
    columns: tuple[ColumnMeta, ...]

    def column(self, name: str) -> Optional[ColumnMeta]:
        lowered = name.lower()
        for col in self.columns:
            if col.cleaned_name == lowered:
                return col
        return None


@dataclass
class RenameLedger:
    """Original identifier -> final identifier, per table.

    ``columns`` is keyed by final table name and is total over each table's
    final columns (untouched and derived names map to themselves), so it is a
    per-table bijection onto the final schema.
    """

    tables: dict[str, str] = field(default_factory=dict)
    columns: dict[str, dict[str, str]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"tables": dict(self.tables), "columns": {t: dict(m) for t, m in self.columns.items()}}

    @classmethod
    def from_json(cls, data: dict) -> "RenameLedger":
        return cls(tables=dict(data.get("tables", {})),
                   columns={t: dict(m) for t, m in data.get("columns", {}).items()})


@dataclass
class OnboardedDatabase:
    """A registered database: cleaned schema plus the queryable store on disk."""

    id: str
    tables: list[TableMeta]
    rename_ledger: RenameLedger
    derived_columns: dict[str, list[str]]
    created_at: str
    store_path: Optional[Path] = None

    def get_table(self, name: str) -> Optional[TableMeta]:
        lowered = name.lower()
        for table in self.tables:
            if table.name == lowered:
                return table
        return None

    def tables_with_column(self, column: str) -> list[str]:
        lowered = column.lower()
        return [t.name for t in self.tables if t.column(lowered) is not None]

    def find_column(self, table: str, column: str) -> Optional[ColumnMeta]:
        meta = self.get_table(table)
        return meta.column(column) if meta else None

    def display_names(self) -> dict[str, str]:
        """Final column name -> original name, merged across tables, for UIs
        that show users the identifiers they uploaded."""
        out: dict[str, str] = {}
        for mapping in self.rename_ledger.columns.values():
            for original, final in mapping.items():
                out.setdefault(final, original)
        return out

    def to_wire_schema(self) -> dict:
        """Shape posted to a remote translation backend."""
        return {
            "tables": [
                {
                    "name": t.name,
                    "columns": [{"name": c.cleaned_name, "type": c.data_type} for c in t.columns],
                }
                for t in self.tables
            ]
        }

    def schema_document(self) -> dict:
        """Content of the schema.json sidecar (deterministic for a given source+config)."""
        return {
            "tables": [
                {
                    "name": t.name,
                    "original_name": t.original_name,
                    "columns": [
                        {
                            "original_name": c.original_name,
                            "cleaned_name": c.cleaned_name,
                            "synonyms": list(c.synonyms),
                            "data_type": c.data_type,
                            "datetime_format": c.datetime_format,
                        }
                        for c in t.columns
                    ],
                }
                for t in self.tables
            ],
            "rename_ledger": self.rename_ledger.to_json(),
            "derived_columns": {k: list(v) for k, v in self.derived_columns.items()},
        }


@dataclass
class OnboardingConfig:
    """Human-supplied onboarding knowledge, keyed by source (original) names.

    Keys may be bare column names or "table.column" when a bare name is
    ambiguous across tables. ``renames`` carries the manual enforce-English
    step (e.g. "PCs" -> "quantity"); the system validates but never invents
    these.
    """

    synonym_map: dict[str, list[str]] = field(default_factory=dict)
    datetime_columns: dict[str, str] = field(default_factory=dict)
    renames: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_json(cls, data: dict) -> "OnboardingConfig":
        return cls(
            synonym_map={k: list(v) for k, v in data.get("synonym_map", {}).items()},
            datetime_columns=dict(data.get("datetime_columns", {})),
            renames=dict(data.get("renames", {})),
        )


class DateFormat:
    """Pattern string over {yyyy, mm, dd} plus literal separators, e.g. "yyyy-mm-dd".

    Two-digit year tokens are rejected outright; each of yyyy, mm, dd must
    appear exactly once.
    """

    _TOKEN_RE = re.compile(r"yyyy|mm|dd|yy")

    def __init__(self, descriptor: str):
        self.descriptor = descriptor
        parts: list[str] = []
        seen: list[str] = []
        pos = 0
        for m in self._TOKEN_RE.finditer(descriptor):
            if m.group(0) == "yy":
                raise OnboardingError(f"descriptor {descriptor!r}: two-digit years are unsupported")
            parts.append(re.escape(descriptor[pos:m.start()]))
            token = m.group(0)
            if token in seen:
                raise OnboardingError(f"descriptor {descriptor!r}: token {token!r} repeats")
            seen.append(token)
            group = {"yyyy": r"(?P<year>\d{4})", "mm": r"(?P<month>\d{2})", "dd": r"(?P<day>\d{2})"}[token]
            parts.append(group)
            pos = m.end()
        parts.append(re.escape(descriptor[pos:]))
        if set(seen) != {"yyyy", "mm", "dd"}:
            raise OnboardingError(f"descriptor {descriptor!r} must contain yyyy, mm and dd exactly once")
        self._regex = re.compile("".join(parts))

    def parse(self, value: str) -> tuple[int, int, int]:
        """Parse a raw value into (year, month, day); FormatMismatch when it does not fit."""
        m = self._regex.fullmatch(value.strip())
        if not m:
            raise FormatMismatch(f"value {value!r} does not match descriptor {self.descriptor!r}")
        year, month, day = int(m.group("year")), int(m.group("month")), int(m.group("day"))
        try:
            dt.date(year, month, day)
        except ValueError:
            raise FormatMismatch(f"value {value!r} is not a real calendar date")
        return year, month, day

    def format(self, year: int, month: int, day: int) -> str:
        """Inverse of parse: render (year, month, day) back in this descriptor."""
        out = self.descriptor
        out = out.replace("yyyy", f"{year:04d}")
        out = out.replace("mm", f"{month:02d}")
        out = out.replace("dd", f"{day:02d}")
        return out


def apply_synonyms(column: ColumnMeta, synonyms: list[str], peer_columns: Iterable[ColumnMeta]) -> ColumnMeta:
    """Concatenate synonyms onto a column's final name.

    Raises AmbiguityError if any synonym token already appears as a token of
    a peer column's final name.
    """
    if not synonyms:
        return column
    cleaned = [clean_identifier(s) for s in synonyms]
    peer_tokens: dict[str, str] = {}
    for peer in peer_columns:
        for token in peer.cleaned_name.split("_"):
            peer_tokens.setdefault(token, peer.cleaned_name)
    for syn in cleaned:
        for token in syn.split("_"):
            if token in peer_tokens:
                raise AmbiguityError(
                    f"synonym {syn!r} for column {column.cleaned_name!r} collides with "
                    f"peer column {peer_tokens[token]!r} (token {token!r})"
                )
    new_name = "_".join([column.cleaned_name] + cleaned)
    return replace(column, cleaned_name=new_name, synonyms=tuple(cleaned))


_DERIVED_SUFFIXES = ("day", "month", "year", "month_name_short", "month_name_long")


@dataclass(frozen=True)
class DerivedColumn:
    meta: ColumnMeta
    values: tuple


def expand_datetime_column(column: ColumnMeta, fmt: DateFormat, values: Iterable) -> list[DerivedColumn]:
    """Split a datetime column into day, month, year, and short/long month names.

    Nulls propagate; a non-null value that does not fit the descriptor raises
    FormatMismatch carrying the offending row index.
    """
    days: list = []
    months: list = []
    years: list = []
    shorts: list = []
    longs: list = []
    for idx, raw in enumerate(values):
        if raw is None or (isinstance(raw, str) and not raw.strip()):
            for bucket in (days, months, years, shorts, longs):
                bucket.append(None)
            continue
        try:
            year, month, day = fmt.parse(str(raw))
        except FormatMismatch as exc:
            raise FormatMismatch(str(exc), row_index=idx) from None
        days.append(day)
        months.append(month)
        years.append(year)
        shorts.append(calendar.month_abbr[month])
        longs.append(calendar.month_name[month])
    base = column.cleaned_name
    specs = [
        (f"{base}_day", NUMERIC, days),
        (f"{base}_month", NUMERIC, months),
        (f"{base}_year", NUMERIC, years),
        (f"{base}_month_name_short", TEXTUAL, shorts),
        (f"{base}_month_name_long", TEXTUAL, longs),
    ]
    return [
        DerivedColumn(
            meta=ColumnMeta(original_name=name, cleaned_name=name, data_type=data_type),
            values=tuple(vals),
        )
        for name, data_type, vals in specs
    ]


@dataclass
class _SourceTable:
    name: str
    columns: list[str]
    rows: list[list]


def _read_csv(path: Path) -> list[_SourceTable]:
    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise OnboardingError(f"{path.name}: csv file is empty (header row required)")
        rows = [row for row in reader]
    if not header or all(not h.strip() for h in header):
        raise OnboardingError(f"{path.name}: csv header row is empty")
    width = len(header)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise OnboardingError(f"{path.name}: row {i + 1} has {len(row)} fields, expected {width}")
    return [_SourceTable(name=path.stem, columns=header, rows=rows)]


def _read_sqlite(path: Path) -> list[_SourceTable]:
    conn = sqlite3.connect(f"file:{path}?mode=ro", uri=True)
    try:
        names = [
            r[0]
            for r in conn.execute(
                "SELECT name FROM sqlite_master WHERE type='table' AND name NOT LIKE 'sqlite_%' ORDER BY name"
            )
        ]
        if not names:
            raise OnboardingError(f"{path.name}: SQLite file has no tables")
        tables = []
        for name in names:
            cols = [r[1] for r in conn.execute(f'PRAGMA table_info("{name}")')]
            rows = [list(r) for r in conn.execute(f'SELECT * FROM "{name}"')]
            tables.append(_SourceTable(name=name, columns=cols, rows=rows))
        return tables
    finally:
        conn.close()


def _looks_like_sqlite(path: Path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(16) == SQLITE_MAGIC


def _infer_type(values: list) -> str:
    saw_value = False
    all_numeric = True
    for v in values:
        if v is None or (isinstance(v, str) and not v.strip()):
            continue
        saw_value = True
        if isinstance(v, (int, float)):
            continue
        if not _FLOAT_RE.match(str(v).strip()):
            all_numeric = False
            break
    return NUMERIC if (saw_value and all_numeric) else TEXTUAL


def _resolve_config_key(key: str, tables: list[_SourceTable]) -> tuple[str, str]:
    """Map a config key ("column" or "table.column", original names) to (table, column)."""
    if "." in key:
        table_part, col_part = key.split(".", 1)
        for table in tables:
            if table.name == table_part and col_part in table.columns:
                return table.name, col_part
        raise OnboardingError(f"config references unknown column {key!r}")
    owners = [t.name for t in tables if key in t.columns]
    if not owners:
        raise OnboardingError(f"config references unknown column {key!r}")
    if len(owners) > 1:
        raise OnboardingError(f"config key {key!r} is ambiguous across tables {owners}; qualify it")
    return owners[0], key


def _sql_type(data_type: str, values: list) -> str:
    if data_type == NUMERIC:
        for v in values:
            if v is None:
                continue
            if isinstance(v, float) or (isinstance(v, str) and not _INT_RE.match(v.strip())):
                return "REAL"
        return "INTEGER"
    return "TEXT"


def onboard_database(
    source: Path | str,
    config: OnboardingConfig | None = None,
    dest_dir: Path | str | None = None,
    database_id: str | None = None,
) -> OnboardedDatabase:
    """Register a csv file or single-file SQLite database.

    Produces ``<dest_dir>/store.sqlite`` (cleaned identifiers, derived datetime
    columns materialized) and ``<dest_dir>/schema.json``. When dest_dir is
    None the store lives next to the source as ``<source>.onboarded/``.
    """
    source = Path(source)
    config = config or OnboardingConfig()
    if not source.exists():
        raise OnboardingError(f"source {source} does not exist")
    if dest_dir is None:
        dest_dir = source.with_suffix("").parent / f"{source.stem}.onboarded"
    dest_dir = Path(dest_dir)
    dest_dir.mkdir(parents=True, exist_ok=True)

    raw_tables = _read_sqlite(source) if _looks_like_sqlite(source) else _read_csv(source)

    # Config keys must reference real source columns before any work starts.
    renames = {_resolve_config_key(k, raw_tables): v for k, v in config.renames.items()}
    synonym_map = {_resolve_config_key(k, raw_tables): v for k, v in config.synonym_map.items()}
    datetime_map = {
        _resolve_config_key(k, raw_tables): DateFormat(v) for k, v in config.datetime_columns.items()
    }

    ledger = RenameLedger()
    derived_columns: dict[str, list[str]] = {}
    tables: list[TableMeta] = []
    store_payload: list[tuple[TableMeta, list[str], list[list]]] = []

    for raw in raw_tables:
        final_table = clean_identifier(raw.name)
        if any(t.name == final_table for t in tables):
            raise OnboardingError(f"duplicate table name {final_table!r} after cleaning")
        ledger.tables[raw.name] = final_table
        col_ledger: dict[str, str] = {}

        column_values = list(zip(*raw.rows)) if raw.rows else [tuple()] * len(raw.columns)
        metas: list[ColumnMeta] = []
        for original, values in zip(raw.columns, column_values):
            english = renames.get((raw.name, original), original)
            cleaned = clean_identifier(english)
            fmt = datetime_map.get((raw.name, original))
            data_type = DATETIME if fmt else _infer_type(list(values))
            metas.append(
                ColumnMeta(
                    original_name=original,
                    cleaned_name=cleaned,
                    data_type=data_type,
                    datetime_format=fmt.descriptor if fmt else None,
                )
            )

        # Synonyms attach one column at a time; each addition is checked
        # against every other column's final name as it stands.
        for i, original in enumerate(raw.columns):
            syns = synonym_map.get((raw.name, original))
            if syns:
                peers = [m for j, m in enumerate(metas) if j != i]
                metas[i] = apply_synonyms(metas[i], syns, peers)

        finals = [m.cleaned_name for m in metas]
        if len(set(finals)) != len(finals):
            dupes = sorted({n for n in finals if finals.count(n) > 1})
            raise OnboardingError(f"table {final_table!r}: duplicate final identifiers {dupes}")
        for original, meta in zip(raw.columns, metas):
            col_ledger[original] = meta.cleaned_name

        all_values: list[list] = [list(v) for v in column_values]
        for i, meta in enumerate(list(metas)):
            if meta.data_type != DATETIME:
                continue
            fmt = DateFormat(meta.datetime_format)
            derived = expand_datetime_column(meta, fmt, all_values[i])
            for dcol in derived:
                if dcol.meta.cleaned_name in [m.cleaned_name for m in metas]:
                    raise OnboardingError(
                        f"derived column {dcol.meta.cleaned_name!r} collides with an existing column"
                    )
                metas.append(dcol.meta)
                all_values.append(list(dcol.values))
                col_ledger[dcol.meta.cleaned_name] = dcol.meta.cleaned_name
            derived_columns[f"{final_table}.{meta.cleaned_name}"] = [
                d.meta.cleaned_name for d in derived
            ]

        ledger.columns[final_table] = col_ledger
        table_meta = TableMeta(name=final_table, original_name=raw.name, columns=tuple(metas))
        tables.append(table_meta)
        rows = [list(row) for row in zip(*all_values)] if all_values and all_values[0] else []
        store_payload.append((table_meta, [m.cleaned_name for m in metas], rows))

    store_path = dest_dir / "store.sqlite"
    if store_path.exists():
        store_path.unlink()
    conn = sqlite3.connect(store_path)
    try:
        for table_meta, col_names, rows in store_payload:
            col_values = list(zip(*rows)) if rows else [tuple()] * len(col_names)
            decls = ", ".join(
                f'"{name}" {_sql_type(meta.data_type, list(vals))}'
                for name, meta, vals in zip(col_names, table_meta.columns, col_values)
            )
            conn.execute(f'CREATE TABLE "{table_meta.name}" ({decls})')
            if rows:
                placeholders = ", ".join("?" for _ in col_names)
                prepared = [
                    [_coerce_store_value(v, m.data_type) for v, m in zip(row, table_meta.columns)]
                    for row in rows
                ]
                conn.executemany(f'INSERT INTO "{table_meta.name}" VALUES ({placeholders})', prepared)
        conn.commit()
    finally:
        conn.close()

    db = OnboardedDatabase(
        id=database_id or uuid.uuid4().hex[:12],
        tables=tables,
        rename_ledger=ledger,
        derived_columns=derived_columns,
        created_at=dt.datetime.now(dt.timezone.utc).isoformat(),
        store_path=store_path,
    )
    (dest_dir / "schema.json").write_text(
        json.dumps(db.schema_document(), indent=2) + "\n", encoding="utf-8"
    )
    return db


def _coerce_store_value(value, data_type: str):
    if value is None or (isinstance(value, str) and not value.strip() and data_type != TEXTUAL):
        return None
    if data_type == NUMERIC and isinstance(value, str):
        text = value.strip()
        return int(text) if _INT_RE.match(text) else float(text)
    return value


def load_onboarded(dest_dir: Path | str, database_id: str) -> OnboardedDatabase:
    """Rehydrate an OnboardedDatabase from its schema.json sidecar."""
    dest_dir = Path(dest_dir)
    doc = json.loads((dest_dir / "schema.json").read_text(encoding="utf-8"))
    tables = [
        TableMeta(
            name=t["name"],
            original_name=t["original_name"],
            columns=tuple(
                ColumnMeta(
                    original_name=c["original_name"],
                    cleaned_name=c["cleaned_name"],
                    synonyms=tuple(c.get("synonyms", ())),
                    data_type=c["data_type"],
                    datetime_format=c.get("datetime_format"),
                )
                for c in t["columns"]
            ),
        )
        for t in doc["tables"]
    ]
    created = dt.datetime.fromtimestamp((dest_dir / "schema.json").stat().st_mtime, dt.timezone.utc)
    return OnboardedDatabase(
        id=database_id,
        tables=tables,
        rename_ledger=RenameLedger.from_json(doc["rename_ledger"]),
        derived_columns={k: list(v) for k, v in doc["derived_columns"].items()},
        created_at=created.isoformat(),
        store_path=dest_dir / "store.sqlite",
    )
