import random

import pytest

from nlsql.errors import UnknownIdentifier, UnsupportedSyntax, UnterminatedLiteral
from nlsql.sqlparser import (
    DML,
    IDENTIFIER,
    KEYWORD,
    PUNCTUATION,
    WHITESPACE,
    ColumnRef,
    find_terminals,
    parse,
    render,
    tokenize,
)

from sqlgen import generate_query


class TestTokenize:
    def test_simple_statement_kinds(self):
        tokens = tokenize("SELECT * FROM t")
        kinds = [(t.kind, t.text) for t in tokens]
        assert kinds == [
            (DML, "SELECT"),
            (WHITESPACE, " "),
            (PUNCTUATION, "*"),
            (WHITESPACE, " "),
            (KEYWORD, "FROM"),
            (WHITESPACE, " "),
            (IDENTIFIER, "t"),
        ]

    def test_empty_input(self):
        assert tokenize("") == []

    def test_unterminated_literal(self):
        with pytest.raises(UnterminatedLiteral):
            tokenize("WHERE a = 'x")

    def test_quoted_literal_kept_intact(self):
        tokens = [t for t in tokenize("WHERE a = 'it''s'") if t.kind == "Literal"]
        assert tokens[0].text == "'it''s'"

    def test_where_and_setop_have_their_own_kinds(self):
        kinds = {t.text.upper(): t.kind for t in tokenize("SELECT a FROM b WHERE c = 1 UNION SELECT d FROM e")}
        assert kinds["WHERE"] == "Where"
        assert kinds["UNION"] == "SetOp"

    def test_lossless_on_odd_input(self):
        text = "SeLeCt  a.b , COUNT(*)\nFROM \"my table\" WHERE x >= -3.5 ; @junk"
        assert "".join(t.text for t in tokenize(text)) == text


class TestParse:
    def test_table1_customer_row(self):
        parsed = parse("SELECT customer.email FROM customer WHERE customer.first_name = 'MARY'")
        assert parsed.tables == ["customer"]
        cond = parsed.where_conditions[0]
        assert (cond.column.table, cond.column.column) == ("customer", "first_name")
        assert cond.operator == "="
        assert cond.value.text == "'MARY'"

    def test_star(self):
        parsed = parse("SELECT * FROM t")
        assert parsed.tables == ["t"]
        assert parsed.where_conditions == []

    def test_window_functions_rejected(self):
        with pytest.raises(UnsupportedSyntax):
            parse("SELECT RANK() OVER (PARTITION BY a) FROM t")
        with pytest.raises(UnsupportedSyntax):
            parse("SELECT a FROM t WHERE b = 1 ORDER BY RANK()")

    def test_subqueries_rejected(self):
        with pytest.raises(UnsupportedSyntax):
            parse("SELECT a FROM t WHERE b = (SELECT max(b) FROM t)")

    def test_non_select_rejected(self):
        with pytest.raises(UnsupportedSyntax):
            parse("DROP TABLE t")

    def test_single_top_level_set_op(self):
        parsed = parse("SELECT a.x FROM a INTERSECT SELECT b.x FROM b")
        assert parsed.set_op.op == "INTERSECT"
        with pytest.raises(UnsupportedSyntax):
            parse("SELECT a.x FROM a UNION SELECT b.x FROM b UNION SELECT c.x FROM c")

    def test_join_without_on_then_join_with_on(self):
        parsed = parse(
            "SELECT film.title FROM actor JOIN film JOIN film_actor "
            "ON actor.actor_id = film_actor.actor_id AND film_actor.film_id = film.film_id"
        )
        assert parsed.tables == ["actor", "film", "film_actor"]
        assert parsed.joins[0].on == []
        assert len(parsed.joins[1].on) == 2

    def test_redundant_on_conjuncts_kept_verbatim(self):
        parsed = parse(
            "SELECT a.x FROM a JOIN b ON a.id = b.id AND a.id = b.id"
        )
        assert len(parsed.joins[0].on) == 2

    def test_quoted_identifiers_normalized(self):
        parsed = parse('SELECT "order total" FROM `my table`')
        assert parsed.from_table == "my table"
        assert parsed.select_items[0].column == "order total"

    def test_unqualified_columns_resolved_against_schema(self, sales_db):
        parsed = parse("SELECT region FROM sales WHERE revenue > 100", sales_db)
        assert parsed.select_items[0].table == "sales"
        assert parsed.where_conditions[0].column.table == "sales"

    def test_unknown_identifiers(self, sales_db):
        with pytest.raises(UnknownIdentifier):
            parse("SELECT nope FROM sales", sales_db)
        with pytest.raises(UnknownIdentifier):
            parse("SELECT region FROM nope", sales_db)

    def test_case_insensitive_schema_lookup(self, sales_db):
        parsed = parse("SELECT Sales.Region FROM Sales", sales_db)
        assert parsed.tables == ["Sales"]


class TestFindTerminals:
    def test_single_terminal(self):
        parsed = parse("SELECT DISTINCT quakes.place FROM quakes WHERE quakes.longitude = 'Terminal'")
        found = find_terminals(parsed)
        assert found == [(0, ColumnRef(table="quakes", column="longitude"))]

    def test_no_terminals(self):
        parsed = parse("SELECT a.x FROM a WHERE a.y = 'other'")
        assert find_terminals(parsed) == []

    def test_terminal_is_case_sensitive(self):
        parsed = parse("SELECT a.x FROM a WHERE a.y = 'TERMINAL'")
        assert find_terminals(parsed) == []

    def test_two_terminals_in_source_order(self):
        parsed = parse(
            "SELECT a.x FROM a WHERE a.low = 'Terminal' AND a.high = 'Terminal'"
        )
        found = find_terminals(parsed)
        assert [i for i, _ in found] == [0, 1]
        assert [c.column for _, c in found] == ["low", "high"]
        positions = [parsed.all_conditions()[i].value.position for i, _ in found]
        assert positions == sorted(positions)


class TestRoundTrip:
    def test_lossless_and_render_round_trip_sample(self):
        rng = random.Random(20210704)
        for _ in range(500):
            sql = generate_query(rng)
            tokens = tokenize(sql)
            assert "".join(t.text for t in tokens) == sql
            parsed = parse(sql)
            assert parse(render(parsed)) == parsed
