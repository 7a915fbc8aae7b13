"""Replace ``'Terminal'`` placeholders in generated SQL with real values.

Each placeholder is dispatched on its column's data type:

* textual  — clean the question and the column's distinct values, spell-correct
  question tokens by minimum edit distance against the English wordlist plus
  the column's own value tokens, then match unigrams/bigrams of the corrected
  question against the cleaned values;
* numeric  — convert English number words to digits, pull all numerals out of
  the question in order, and assign them positionally to the numeric
  placeholders;
* datetime — insert the yyyymmdd form of the question's temporal spans, again
  positionally.

Anything that cannot be resolved is left in place and produces a warning
urging the user to check the query again. The SQL is never rewritten beyond
the placeholder literals themselves.
"""

from __future__ import annotations

import re
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from . import sqlparser
from .numwords import extract_numerals
from .onboarding import DATETIME, NUMERIC, TEXTUAL, OnboardedDatabase
from .sqlparser import TERMINAL_LITERAL, SqlLiteral, find_terminals, parse
from .temporal import NormalizedQuery

METHOD_EXACT = "exact"
METHOD_SPELL = "spell_corrected"
METHOD_BIGRAM = "bigram"
METHOD_NUMERIC = "numeric_order"
METHOD_DATETIME = "datetime"

CHECK_QUERY_HINT = "please check the query again"

_NON_ALNUM_RE = re.compile(r"[^a-z0-9]+")
_HAS_DIGIT_RE = re.compile(r"\d")


def clean_text(text: str) -> str:
    """Lowercase and strip punctuation, collapsing separators to single spaces."""
    return _NON_ALNUM_RE.sub(" ", text.lower()).strip()


def _load_words(path: Optional[Path], default_resource: str) -> frozenset[str]:
    if path is not None:
        raw = Path(path).read_text(encoding="utf-8")
    else:
        raw = resources.files("nlsql.data").joinpath(default_resource).read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in raw.splitlines() if w.strip())


def load_wordlist(path: Optional[Path] = None) -> frozenset[str]:
    return _load_words(path, "wordlist.txt")


def load_stopwords(path: Optional[Path] = None) -> frozenset[str]:
    return _load_words(path, "stopwords.txt")


def edit_distance(a: str, b: str, cap: Optional[int] = None) -> int:
    """Levenshtein distance; with ``cap`` the scan exits early once the best
    possible outcome exceeds it (returned value is then only a lower bound)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        if cap is not None and min(current) > cap:
            return cap + 1
        previous = current
    return previous[-1]


def correction_threshold(token: str) -> int:
    return 1 if len(token) <= 4 else 2


@dataclass(frozen=True)
class Correction:
    original: str
    corrected: str
    distance: int

    @property
    def changed(self) -> bool:
        return self.original != self.corrected


class SpellCorrector:
    """Minimum-edit-distance correction against (wordlist ∪ column value tokens).

    Ties break toward column-value tokens, then lexicographically.
    """

    def __init__(self, wordlist: Iterable[str], value_tokens: Iterable[str]):
        self.value_tokens = frozenset(value_tokens)
        self.wordlist = frozenset(wordlist)
        self.candidates = self.wordlist | self.value_tokens

    def correct(self, token: str) -> Correction:
        if not token or _HAS_DIGIT_RE.search(token) or token in self.candidates:
            return Correction(token, token, 0)
        threshold = correction_threshold(token)
        best: Optional[tuple[int, int, str]] = None
        for candidate in self.candidates:
            if abs(len(candidate) - len(token)) > threshold:
                continue
            distance = edit_distance(token, candidate, cap=threshold)
            if distance > threshold:
                continue
            rank = (distance, 0 if candidate in self.value_tokens else 1, candidate)
            if best is None or rank < best:
                best = rank
        if best is None:
            return Correction(token, token, 0)
        return Correction(token, best[2], best[0])


@dataclass(frozen=True)
class ValueIndex:
    """Distinct values of one column, with cleaned forms aligned 1:1."""

    table: str
    column: str
    values: tuple[str, ...]
    cleaned: tuple[str, ...]

    @classmethod
    def build(cls, table: str, column: str, values: Iterable) -> "ValueIndex":
        originals = tuple(str(v) for v in values if v is not None)
        return cls(table=table, column=column, values=originals,
                   cleaned=tuple(clean_text(v) for v in originals))

    def tokens(self) -> set[str]:
        out: set[str] = set()
        for cleaned in self.cleaned:
            out.update(cleaned.split())
        return out


class ValueIndexCache:
    """Lazily built per-column indexes over a value store, bounded in total
    stored values; concurrent builds of the same column happen once."""

    def __init__(self, store, max_total_values: int = 100_000):
        self._store = store
        self._max_total = max_total_values
        self._cache: OrderedDict[tuple[str, str], ValueIndex] = OrderedDict()
        self._total = 0
        self._lock = threading.Lock()
        self._building: dict[tuple[str, str], threading.Event] = {}

    def get(self, table: str, column: str) -> ValueIndex:
        key = (table, column)
        while True:
            with self._lock:
                if key in self._cache:
                    self._cache.move_to_end(key)
                    return self._cache[key]
                event = self._building.get(key)
                if event is None:
                    event = threading.Event()
                    self._building[key] = event
                    break
            event.wait()
        try:
            index = ValueIndex.build(table, column, self._store.distinct_values(table, column))
            with self._lock:
                self._total += len(index.values)
                self._cache[key] = index
                while self._total > self._max_total and len(self._cache) > 1:
                    _, evicted = self._cache.popitem(last=False)
                    self._total -= len(evicted.values)
            return index
        finally:
            with self._lock:
                del self._building[key]
            event.set()


@dataclass(frozen=True)
class TextualResolution:
    value: Optional[str]
    method: Optional[str]
    ambiguous: tuple[str, ...] = ()


def resolve_textual(
    query: str,
    index: ValueIndex,
    wordlist: Optional[frozenset[str]] = None,
    stopwords: Optional[frozenset[str]] = None,
) -> TextualResolution:
    """Pick the column value the question refers to, or nothing."""
    wordlist = wordlist if wordlist is not None else load_wordlist()
    stopwords = stopwords if stopwords is not None else load_stopwords()
    corrector = SpellCorrector(wordlist, index.tokens())
    corrections = [corrector.correct(tok) for tok in clean_text(query).split()]

    # (gram text, token count, any token corrected)
    grams: list[tuple[str, int, bool]] = []
    for c in corrections:
        if c.corrected not in stopwords:
            grams.append((c.corrected, 1, c.changed))
    for left, right in zip(corrections, corrections[1:]):
        if left.corrected in stopwords and right.corrected in stopwords:
            continue
        grams.append((f"{left.corrected} {right.corrected}", 2, left.changed or right.changed))

    # value -> best (token count, char length, corrected?) gram that hit it
    hits: dict[str, tuple[int, int, bool]] = {}
    lookup: dict[str, list[str]] = {}
    for original, cleaned in zip(index.values, index.cleaned):
        if cleaned:
            lookup.setdefault(cleaned, []).append(original)
    for gram, size, corrected in grams:
        for original in lookup.get(gram, ()):
            key = (size, len(gram), corrected)
            previous = hits.get(original)
            if previous is None or key[:2] > previous[:2] or (key[:2] == previous[:2] and not corrected):
                hits[original] = key

    if not hits:
        return TextualResolution(value=None, method=None)
    best_len = max(v[:2] for v in hits.values())
    winners = sorted(v for v, k in hits.items() if k[:2] == best_len)
    if len(winners) > 1:
        return TextualResolution(value=None, method=None, ambiguous=tuple(winners))
    value = winners[0]
    size, _, corrected = hits[value]
    if corrected:
        method = METHOD_SPELL
    elif size == 2:
        method = METHOD_BIGRAM
    else:
        method = METHOD_EXACT
    return TextualResolution(value=value, method=method)


def resolve_numeric(query: str, terminal_count: int,
                    masked_spans: Iterable[tuple[int, int]] = ()) -> list[Optional[str]]:
    """Numerals of the question (number words converted first) assigned to
    numeric placeholders in order; missing ones come back as None."""
    masked = query
    for start, end in masked_spans:
        masked = masked[:start] + " " * (end - start) + masked[end:]
    numerals = extract_numerals(masked)
    return [numerals[i] if i < len(numerals) else None for i in range(terminal_count)]


def resolve_datetime(query: NormalizedQuery, position: int) -> Optional[str]:
    """yyyymmdd for the position-th temporal span of the question; spans
    lacking a day (or month) are padded with 01."""
    subs = query.substitutions
    if position >= len(subs):
        return None
    span = subs[position][0]
    return f"{span.year:04d}{(span.month or 1):02d}{(span.day or 1):02d}"


@dataclass(frozen=True)
class Replacement:
    column: str
    value: str
    method: str


@dataclass
class ResolutionResult:
    sql: str
    replacements: list[Replacement] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def fully_resolved(self) -> bool:
        return TERMINAL_LITERAL not in self.sql


def _quote(value: str) -> str:
    return "'" + value.replace("'", "''") + "'"


def resolve(
    query: NormalizedQuery,
    candidate,
    schema: OnboardedDatabase,
    store,
    wordlist: Optional[frozenset[str]] = None,
    stopwords: Optional[frozenset[str]] = None,
) -> ResolutionResult:
    """Resolve every Terminal in ``candidate.sql``; parser errors propagate.

    ``store`` must expose ``distinct_values(table, column)``; pass a
    ValueIndexCache-backed store to amortize repeated columns.
    """
    sql = candidate.sql if hasattr(candidate, "sql") else str(candidate)
    parsed = parse(sql, schema)
    terminals = find_terminals(parsed)
    result = ResolutionResult(sql=sql)
    if not terminals:
        return result

    conditions = parsed.all_conditions()
    index_cache = store if isinstance(store, ValueIndexCache) else ValueIndexCache(store)

    # Positional counters per branch, in the placeholders' textual order.
    temporal_spans = [(s.start, s.end) for s, _ in query.substitutions]
    numeric_values: Optional[list[Optional[str]]] = None
    numeric_seen = 0
    datetime_seen = 0

    total_numeric = 0
    typed: list[tuple[sqlparser.Condition, str, str]] = []
    for cond_index, colref in terminals:
        meta = schema.find_column(colref.table, colref.column) if colref.table else None
        data_type = meta.data_type if meta else TEXTUAL
        typed.append((conditions[cond_index], colref.render(), data_type))
        if data_type == NUMERIC:
            total_numeric += 1
    if total_numeric:
        numeric_values = resolve_numeric(query.original, total_numeric, temporal_spans)

    edits: list[tuple[int, str]] = []  # (literal offset, replacement text)
    for (cond, column_name, data_type) in typed:
        literal: SqlLiteral = cond.value
        if data_type == NUMERIC:
            value = numeric_values[numeric_seen]
            numeric_seen += 1
            if value is None:
                result.warnings.append(
                    f"could not resolve a numeric value for {column_name}; {CHECK_QUERY_HINT}"
                )
                continue
            edits.append((literal.position, value))
            result.replacements.append(Replacement(column_name, value, METHOD_NUMERIC))
        elif data_type == DATETIME:
            value = resolve_datetime(query, datetime_seen)
            datetime_seen += 1
            if value is None:
                result.warnings.append(
                    f"could not resolve a date for {column_name}; {CHECK_QUERY_HINT}"
                )
                continue
            edits.append((literal.position, _quote(value)))
            result.replacements.append(Replacement(column_name, value, METHOD_DATETIME))
        else:
            table = cond.column.table or ""
            index = index_cache.get(table, cond.column.column)
            match = resolve_textual(query.original, index, wordlist, stopwords)
            if match.value is None:
                if match.ambiguous:
                    result.warnings.append(
                        f"ambiguous value for {column_name} "
                        f"(candidates: {', '.join(match.ambiguous)}); {CHECK_QUERY_HINT}"
                    )
                else:
                    result.warnings.append(
                        f"could not resolve a value for {column_name}; {CHECK_QUERY_HINT}"
                    )
                continue
            edits.append((literal.position, _quote(match.value)))
            result.replacements.append(Replacement(column_name, match.value, match.method))

    # Splice right-to-left so earlier offsets stay valid.
    out = sql
    for offset, text in sorted(edits, reverse=True):
        out = out[:offset] + text + out[offset + len(TERMINAL_LITERAL):]
    result.sql = out
    return result
