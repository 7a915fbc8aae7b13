"""Recognize temporal utterances in a question and rewrite them into the
standard forms the translation model copes with.

A deterministic rule-based recognizer: literal dates (dd/mm/yyyy and
yyyy-mm-dd), "<day> <Month> [<year>]" and "<Month> <day>[, <year>]",
"<Month>[,] <year>", "year <yyyy>", bare four-digit years next to a temporal
cue word, and relative forms (yesterday/today/tomorrow, last/this/next +
day/week/month/year) resolved against an injected reference time.

Rewrites: a fully specified date becomes yyyymmdd digits; month granularity
becomes "Month: <LongMonth>, Year: <yyyy>"; year granularity becomes
"Year: <yyyy>". Already-rewritten forms are left untouched, so normalization
is idempotent.
"""

from __future__ import annotations

import calendar
import datetime as dt
import re
from dataclasses import dataclass
from typing import Optional

EXACT_DATE = "exact_date"
MONTH_YEAR = "month_year"
YEAR_ONLY = "year_only"
RELATIVE = "relative"

_MONTH_NAMES = (
    "January|February|March|April|May|June|July|August|September|October|November|December"
    "|Sept\\.?|Jan\\.?|Feb\\.?|Mar\\.?|Apr\\.?|Jun\\.?|Jul\\.?|Aug\\.?|Sep\\.?|Oct\\.?|Nov\\.?|Dec\\.?"
)
_MONTH_NUM = {name.lower()[:3]: i for i, name in enumerate(calendar.month_name) if name}

_CUE_WORDS = {
    "in", "during", "since", "until", "till", "by", "before", "after",
    "of", "year", "years", "from", "to",
}

# Text regions that are already in normalized form; never rewritten again.
_MASK_PATTERNS = [
    re.compile(r"Month: [A-Z][a-z]+, Year: \d{4}"),
    re.compile(r"Year: \d{4}"),
    re.compile(r"(?<!\d)\d{8}(?!\d)"),
]

_P_ISO = re.compile(r"(?<!\d)(\d{4})-(\d{2})-(\d{2})(?!\d)")
_P_DMY = re.compile(r"(?<!\d)(\d{1,2})/(\d{1,2})/(\d{4})(?!\d)")
_P_DAY_MONTH = re.compile(
    rf"\b(\d{{1,2}})(?:st|nd|rd|th)?\s+(?:of\s+)?({_MONTH_NAMES})(?:,?\s+(\d{{4}}))?(?!\d)",
    re.IGNORECASE,
)
_P_MONTH_DAY = re.compile(
    rf"\b({_MONTH_NAMES})\s+(\d{{1,2}})(?:st|nd|rd|th)?(?:,?\s+(\d{{4}}))?(?!\d)",
    re.IGNORECASE,
)
_P_MONTH_YEAR = re.compile(rf"\b({_MONTH_NAMES})\s*,?\s+(\d{{4}})(?!\d)", re.IGNORECASE)
_P_YEAR_WORD = re.compile(r"\byear\s+(\d{4})(?!\d)", re.IGNORECASE)
_P_REL_DAY = re.compile(r"\b(yesterday|today|tomorrow|(last|this|next)\s+day)\b", re.IGNORECASE)
_P_REL_WEEK = re.compile(r"\b(last|this|next)\s+week\b", re.IGNORECASE)
_P_REL_MONTH = re.compile(r"\b(last|this|next)\s+month\b", re.IGNORECASE)
_P_REL_YEAR = re.compile(r"\b(last|this|next)\s+year\b", re.IGNORECASE)
_P_BARE_YEAR = re.compile(r"(?<!\d)\b(19\d{2}|20\d{2})\b(?!\d)")

_SHIFT = {"last": -1, "this": 0, "next": 1,
          "yesterday": -1, "today": 0, "tomorrow": 1}


@dataclass(frozen=True)
class TemporalSpan:
    start: int
    end: int
    kind: str
    year: int
    month: Optional[int] = None
    day: Optional[int] = None


@dataclass(frozen=True)
class NormalizedQuery:
    original: str
    normalized: str
    substitutions: tuple[tuple[TemporalSpan, str], ...] = ()


def _month_num(name: str) -> int:
    return _MONTH_NUM[name.rstrip(".").lower()[:3]]


def _valid_date(year: int, month: int, day: int) -> bool:
    try:
        dt.date(year, month, day)
    except ValueError:
        return False
    return True


def _ref_date(reference_time) -> dt.date:
    if isinstance(reference_time, dt.datetime):
        return reference_time.date()
    if isinstance(reference_time, dt.date):
        return reference_time
    raise TypeError("reference_time must be a date or datetime")


def _shift_month(ref: dt.date, delta: int) -> tuple[int, int]:
    index = ref.year * 12 + (ref.month - 1) + delta
    return index // 12, index % 12 + 1


def _has_cue(text: str, start: int, end: int) -> bool:
    before = re.search(r"([A-Za-z]+)[^A-Za-z\d]*$", text[:start])
    after = re.match(r"[^A-Za-z\d]*([A-Za-z]+)", text[end:])
    return (before is not None and before.group(1).lower() in _CUE_WORDS) or (
        after is not None and after.group(1).lower() in _CUE_WORDS
    )


def _candidates(query: str, ref: dt.date) -> list[TemporalSpan]:
    found: list[tuple[int, TemporalSpan]] = []

    def add(priority: int, start: int, end: int, kind: str, year: int,
            month: int | None = None, day: int | None = None) -> None:
        found.append((priority, TemporalSpan(start, end, kind, year, month, day)))

    for m in _P_ISO.finditer(query):
        y, mo, d = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if _valid_date(y, mo, d):
            add(0, m.start(), m.end(), EXACT_DATE, y, mo, d)
    for m in _P_DMY.finditer(query):
        d, mo, y = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if _valid_date(y, mo, d):
            add(1, m.start(), m.end(), EXACT_DATE, y, mo, d)
    for m in _P_DAY_MONTH.finditer(query):
        d, mo = int(m.group(1)), _month_num(m.group(2))
        y = int(m.group(3)) if m.group(3) else ref.year
        if _valid_date(y, mo, d):
            add(2, m.start(), m.end(), EXACT_DATE, y, mo, d)
    for m in _P_MONTH_DAY.finditer(query):
        mo, d = _month_num(m.group(1)), int(m.group(2))
        y = int(m.group(3)) if m.group(3) else ref.year
        if _valid_date(y, mo, d):
            add(3, m.start(), m.end(), EXACT_DATE, y, mo, d)
    for m in _P_MONTH_YEAR.finditer(query):
        add(4, m.start(), m.end(), MONTH_YEAR, int(m.group(2)), _month_num(m.group(1)))
    for m in _P_YEAR_WORD.finditer(query):
        add(5, m.start(), m.end(), YEAR_ONLY, int(m.group(1)))
    for m in _P_REL_DAY.finditer(query):
        word = (m.group(2) or m.group(1)).lower()
        day = ref + dt.timedelta(days=_SHIFT[word])
        add(6, m.start(), m.end(), RELATIVE, day.year, day.month, day.day)
    for m in _P_REL_WEEK.finditer(query):
        week_start = ref - dt.timedelta(days=ref.weekday())
        anchor = week_start + dt.timedelta(days=7 * _SHIFT[m.group(1).lower()])
        add(7, m.start(), m.end(), RELATIVE, anchor.year, anchor.month)
    for m in _P_REL_MONTH.finditer(query):
        y, mo = _shift_month(ref, _SHIFT[m.group(1).lower()])
        add(8, m.start(), m.end(), RELATIVE, y, mo)
    for m in _P_REL_YEAR.finditer(query):
        add(9, m.start(), m.end(), RELATIVE, ref.year + _SHIFT[m.group(1).lower()])
    for m in _P_BARE_YEAR.finditer(query):
        if _has_cue(query, m.start(), m.end()):
            add(10, m.start(), m.end(), YEAR_ONLY, int(m.group(1)))

    masks = [(m.start(), m.end()) for p in _MASK_PATTERNS for m in p.finditer(query)]

    def overlaps(start: int, end: int, regions) -> bool:
        return any(start < e and s < end for s, e in regions)

    picked: list[TemporalSpan] = []
    for _, span in sorted(found, key=lambda item: (item[1].start, item[1].start - item[1].end, item[0])):
        if overlaps(span.start, span.end, masks):
            continue
        if overlaps(span.start, span.end, [(s.start, s.end) for s in picked]):
            continue
        picked.append(span)
    picked.sort(key=lambda s: s.start)
    return picked


def recognize_temporal(query: str, reference_time) -> list[TemporalSpan]:
    """All non-overlapping maximal temporal spans in the query, relative forms
    resolved against reference_time. Unrecognized text yields no span."""
    return _candidates(query, _ref_date(reference_time))


def replacement_for(span: TemporalSpan) -> str:
    """The standardized text for a span, by granularity of what resolved."""
    if span.day is not None:
        return f"{span.year:04d}{span.month:02d}{span.day:02d}"
    if span.month is not None:
        return f"Month: {calendar.month_name[span.month]}, Year: {span.year}"
    return f"Year: {span.year}"


def normalize_query(query: str, reference_time) -> NormalizedQuery:
    """Rewrite every temporal span into its standard form; everything else is
    preserved verbatim."""
    spans = recognize_temporal(query, reference_time)
    out: list[str] = []
    subs: list[tuple[TemporalSpan, str]] = []
    pos = 0
    for span in spans:
        rep = replacement_for(span)
        out.append(query[pos:span.start])
        out.append(rep)
        subs.append((span, rep))
        pos = span.end
    out.append(query[pos:])
    return NormalizedQuery(original=query, normalized="".join(out), substitutions=tuple(subs))
