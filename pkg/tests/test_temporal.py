import datetime as dt

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlsql.temporal import (
    EXACT_DATE,
    MONTH_YEAR,
    RELATIVE,
    YEAR_ONLY,
    normalize_query,
    recognize_temporal,
)

REF = dt.date(2021, 7, 15)


class TestRecognize:
    def test_month_year_span(self):
        spans = recognize_temporal("revenue in June, 2021", REF)
        assert len(spans) == 1
        span = spans[0]
        assert span.kind == MONTH_YEAR
        assert (span.year, span.month, span.day) == (2021, 6, None)

    def test_no_temporal_content(self):
        assert recognize_temporal("revenue by region", REF) == []

    def test_last_month_with_year_borrow(self):
        span = recognize_temporal("orders last month", dt.date(2021, 1, 10))[0]
        assert span.kind == RELATIVE
        assert (span.year, span.month) == (2020, 12)

    def test_last_month_plain(self):
        span = recognize_temporal("orders last month", REF)[0]
        assert (span.year, span.month) == (2021, 6)

    def test_exact_date_ordinal(self):
        span = recognize_temporal("sales on 4th July 2021", REF)[0]
        assert span.kind == EXACT_DATE
        assert (span.year, span.month, span.day) == (2021, 7, 4)

    def test_ordinal_without_year_uses_reference(self):
        span = recognize_temporal("sales on 9th March", REF)[0]
        assert (span.year, span.month, span.day) == (2021, 3, 9)

    def test_iso_and_slash_literals(self):
        assert recognize_temporal("on 2021-03-09", REF)[0].day == 9
        span = recognize_temporal("on 25/12/2020", REF)[0]
        assert (span.year, span.month, span.day) == (2020, 12, 25)

    def test_year_word(self):
        span = recognize_temporal("total revenue in year 2020", REF)[0]
        assert span.kind == YEAR_ONLY and span.year == 2020

    def test_bare_year_needs_cue(self):
        assert recognize_temporal("profit in 2019", REF)[0].kind == YEAR_ONLY
        assert recognize_temporal("clicked 2019 times", REF) == []

    def test_spans_are_sorted_and_disjoint(self):
        spans = recognize_temporal("from June, 2020 to July, 2021", REF)
        assert len(spans) == 2
        assert spans[0].end <= spans[1].start

    def test_invalid_calendar_dates_skipped(self):
        spans = recognize_temporal("on 31/02/2021 maybe", REF)
        assert all(s.kind != EXACT_DATE for s in spans)

    def test_relative_day_forms(self):
        span = recognize_temporal("sales yesterday", REF)[0]
        assert (span.year, span.month, span.day) == (2021, 7, 14)
        span = recognize_temporal("sales today", REF)[0]
        assert (span.year, span.month, span.day) == (2021, 7, 15)

    def test_last_week_resolves_to_week_start_month(self):
        span = recognize_temporal("sales last week", dt.date(2021, 1, 10))[0]
        assert (span.year, span.month, span.day) == (2020, 12, None)


class TestNormalize:
    @pytest.mark.parametrize(
        "query,expected",
        [
            ("sales on 4th July 2021", "sales on 20210704"),
            ("total revenue in June, 2021", "total revenue in Month: June, Year: 2021"),
            ("total revenue in year 2020", "total revenue in Year: 2020"),
            ("revenue by region", "revenue by region"),
        ],
    )
    def test_replacement_formats(self, query, expected):
        assert normalize_query(query, REF).normalized == expected

    def test_substitutions_reproduce_normalized(self):
        nq = normalize_query("from June, 2020 to 4th July 2021", REF)
        rebuilt = []
        pos = 0
        for span, replacement in nq.substitutions:
            rebuilt.append(nq.original[pos:span.start])
            rebuilt.append(replacement)
            pos = span.end
        rebuilt.append(nq.original[pos:])
        assert "".join(rebuilt) == nq.normalized

    def test_idempotent_on_own_output(self):
        for query in [
            "sales on 4th July 2021",
            "total revenue in June, 2021",
            "profit in 2019",
            "orders last month and sales yesterday",
        ]:
            once = normalize_query(query, REF).normalized
            assert normalize_query(once, REF).normalized == once

    def test_non_span_text_is_verbatim(self):
        nq = normalize_query("Compare  spacing,  in June, 2021 please?", REF)
        span, _ = nq.substitutions[0]
        assert nq.original[:span.start] in nq.normalized
        assert nq.original[span.end:] in nq.normalized

    @given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=60))
    def test_determinism_and_splice_property(self, text):
        first = normalize_query(text, REF)
        second = normalize_query(text, REF)
        assert first == second
        pos = 0
        out = []
        for span, rep in first.substitutions:
            assert span.start < span.end <= len(text)
            assert span.start >= pos
            out.append(text[pos:span.start])
            out.append(rep)
            pos = span.end
        out.append(text[pos:])
        assert "".join(out) == first.normalized
