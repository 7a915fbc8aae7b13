"""Tokenizer and parser for the SELECT subset the pipeline consumes.

Tokenization is lossless (concatenating token texts reproduces the input).
The grammar is deliberately frozen: projections with COUNT/SUM/AVG/MIN/MAX
and DISTINCT, FROM, JOIN..ON, WHERE with AND/OR and comparison operators,
GROUP BY, ORDER BY [ASC|DESC], LIMIT, and one top-level INTERSECT/UNION.
Anything else (window functions, subqueries, non-SELECT statements) fails
loudly with UnsupportedSyntax instead of mis-parsing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import UnknownIdentifier, UnsupportedSyntax, UnterminatedLiteral

DML = "DML"
KEYWORD = "Keyword"
IDENTIFIER = "Identifier"
OPERATOR = "Operator"
LITERAL = "Literal"
WHITESPACE = "Whitespace"
PUNCTUATION = "Punctuation"
WHERE = "Where"
SET_OP = "SetOp"

TERMINAL_LITERAL = "'Terminal'"

_DML_WORDS = {"SELECT", "INSERT", "UPDATE", "DELETE"}
_SET_OP_WORDS = {"UNION", "INTERSECT", "EXCEPT"}
_KEYWORDS = {
    "FROM", "JOIN", "ON", "AND", "OR", "GROUP", "ORDER", "BY", "ASC", "DESC",
    "LIMIT", "DISTINCT", "AS", "COUNT", "SUM", "AVG", "MIN", "MAX", "HAVING",
    "NOT", "IN", "LIKE", "BETWEEN", "IS", "NULL", "INNER", "LEFT", "RIGHT",
    "OUTER", "FULL", "CROSS", "ALL", "OVER", "PARTITION", "RANK", "DENSE_RANK",
    "ROW_NUMBER", "MERGE", "EXISTS", "CASE", "WHEN", "THEN", "ELSE", "END",
    "OFFSET", "CREATE", "DROP", "ALTER", "TABLE", "INTO", "VALUES", "SET",
}
_WINDOW_WORDS = {"OVER", "PARTITION", "RANK", "DENSE_RANK", "ROW_NUMBER", "MERGE"}
_AGG_FUNCS = {"COUNT", "SUM", "AVG", "MIN", "MAX"}

_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"\d+(\.\d+)?")
_PLAIN_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_TWO_CHAR_OPS = ("<=", ">=", "<>", "!=")
_ONE_CHAR_OPS = ("=", "<", ">")


@dataclass(frozen=True)
class SqlToken:
    kind: str
    text: str
    position: int


def tokenize(sql: str) -> list[SqlToken]:
    """Lossless token stream; UnterminatedLiteral on an unclosed quote."""
    tokens: list[SqlToken] = []
    i = 0
    n = len(sql)
    while i < n:
        ch = sql[i]
        if ch.isspace():
            j = i
            while j < n and sql[j].isspace():
                j += 1
            tokens.append(SqlToken(WHITESPACE, sql[i:j], i))
            i = j
            continue
        if ch == "'":
            j = i + 1
            while j < n:
                if sql[j] == "'":
                    if j + 1 < n and sql[j + 1] == "'":  # '' escape
                        j += 2
                        continue
                    break
                j += 1
            if j >= n:
                raise UnterminatedLiteral(f"unterminated string literal at offset {i}")
            tokens.append(SqlToken(LITERAL, sql[i:j + 1], i))
            i = j + 1
            continue
        if ch in ('"', "`"):
            j = sql.find(ch, i + 1)
            if j < 0:
                raise UnterminatedLiteral(f"unterminated quoted identifier at offset {i}")
            tokens.append(SqlToken(IDENTIFIER, sql[i:j + 1], i))
            i = j + 1
            continue
        if ch.isdigit():
            m = _NUMBER_RE.match(sql, i)
            tokens.append(SqlToken(LITERAL, m.group(0), i))
            i = m.end()
            continue
        if ch.isalpha() or ch == "_":
            m = _WORD_RE.match(sql, i)
            word = m.group(0)
            upper = word.upper()
            if upper in _DML_WORDS:
                kind = DML
            elif upper == "WHERE":
                kind = WHERE
            elif upper in _SET_OP_WORDS:
                kind = SET_OP
            elif upper in _KEYWORDS:
                kind = KEYWORD
            else:
                kind = IDENTIFIER
            tokens.append(SqlToken(kind, word, i))
            i = m.end()
            continue
        two = sql[i:i + 2]
        if two in _TWO_CHAR_OPS:
            tokens.append(SqlToken(OPERATOR, two, i))
            i += 2
            continue
        if ch in _ONE_CHAR_OPS:
            tokens.append(SqlToken(OPERATOR, ch, i))
            i += 1
            continue
        tokens.append(SqlToken(PUNCTUATION, ch, i))
        i += 1
    return tokens


@dataclass
class ColumnRef:
    table: Optional[str]
    column: str

    def render(self) -> str:
        col = _render_ident(self.column)
        return f"{_render_ident(self.table)}.{col}" if self.table else col


@dataclass
class Star:
    def render(self) -> str:
        return "*"


@dataclass
class AggregateCall:
    func: str
    arg: Union[ColumnRef, Star]

    def render(self) -> str:
        return f"{self.func.upper()}({self.arg.render()})"


@dataclass
class SqlLiteral:
    text: str
    position: int = field(compare=False, default=-1)

    @property
    def is_string(self) -> bool:
        return self.text.startswith("'")

    def render(self) -> str:
        return self.text


@dataclass
class Condition:
    column: ColumnRef
    operator: str
    value: Union[SqlLiteral, ColumnRef]

    def render(self) -> str:
        return f"{self.column.render()} {self.operator} {self.value.render()}"


@dataclass
class Join:
    table: str
    on: list[Condition] = field(default_factory=list)


@dataclass
class OrderItem:
    expr: Union[ColumnRef, AggregateCall]
    direction: Optional[str] = None


@dataclass
class SetOperation:
    op: str
    left: "ParsedQuery"
    right: "ParsedQuery"


@dataclass
class ParsedQuery:
    select_items: list = field(default_factory=list)
    distinct: bool = False
    from_table: Optional[str] = None
    joins: list[Join] = field(default_factory=list)
    where_conditions: list[Condition] = field(default_factory=list)
    where_connectors: list[str] = field(default_factory=list)
    group_by: list[ColumnRef] = field(default_factory=list)
    order_by: list[OrderItem] = field(default_factory=list)
    limit: Optional[int] = None
    set_op: Optional[SetOperation] = None

    @property
    def tables(self) -> list[str]:
        if self.set_op:
            return self.set_op.left.tables + self.set_op.right.tables
        return [self.from_table] + [j.table for j in self.joins]

    def all_conditions(self) -> list[Condition]:
        """WHERE conditions in textual order, descending into set-op parts."""
        if self.set_op:
            return self.set_op.left.all_conditions() + self.set_op.right.all_conditions()
        return list(self.where_conditions)

    def column_refs(self) -> list[ColumnRef]:
        if self.set_op:
            return self.set_op.left.column_refs() + self.set_op.right.column_refs()
        refs: list[ColumnRef] = []
        for item in self.select_items:
            if isinstance(item, ColumnRef):
                refs.append(item)
            elif isinstance(item, AggregateCall) and isinstance(item.arg, ColumnRef):
                refs.append(item.arg)
        for join in self.joins:
            for cond in join.on:
                refs.append(cond.column)
                if isinstance(cond.value, ColumnRef):
                    refs.append(cond.value)
        for cond in self.where_conditions:
            refs.append(cond.column)
            if isinstance(cond.value, ColumnRef):
                refs.append(cond.value)
        refs.extend(self.group_by)
        for item in self.order_by:
            if isinstance(item.expr, ColumnRef):
                refs.append(item.expr)
            elif isinstance(item.expr, AggregateCall) and isinstance(item.expr.arg, ColumnRef):
                refs.append(item.expr.arg)
        return refs


def _render_ident(name: str) -> str:
    return name if _PLAIN_IDENT_RE.match(name) else f'"{name}"'


def _strip_ident(text: str) -> str:
    if text and text[0] in ('"', "`") and text[-1] == text[0]:
        return text[1:-1]
    return text


class _Parser:
    def __init__(self, tokens: list[SqlToken]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Optional[SqlToken]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> SqlToken:
        tok = self.peek()
        if tok is None:
            raise UnsupportedSyntax("unexpected end of statement")
        self.pos += 1
        return tok

    def at_word(self, *words: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind in (KEYWORD, DML, WHERE, SET_OP) and tok.text.upper() in words

    def take_word(self, *words: str) -> bool:
        if self.at_word(*words):
            self.pos += 1
            return True
        return False

    def expect_word(self, word: str) -> SqlToken:
        tok = self.peek()
        if tok is None or tok.text.upper() != word:
            got = tok.text if tok else "end of statement"
            raise UnsupportedSyntax(f"expected {word}, got {got!r}")
        return self.advance()

    def expect_punct(self, char: str) -> SqlToken:
        tok = self.peek()
        if tok is None or tok.kind != PUNCTUATION or tok.text != char:
            got = tok.text if tok else "end of statement"
            raise UnsupportedSyntax(f"expected {char!r}, got {got!r}")
        return self.advance()

    def parse_identifier(self) -> str:
        tok = self.peek()
        if tok is None or tok.kind != IDENTIFIER:
            got = tok.text if tok else "end of statement"
            raise UnsupportedSyntax(f"expected an identifier, got {got!r}")
        self.advance()
        return _strip_ident(tok.text)

    def parse_column_ref(self) -> ColumnRef:
        first = self.parse_identifier()
        tok = self.peek()
        if tok is not None and tok.kind == PUNCTUATION and tok.text == ".":
            self.advance()
            second = self.parse_identifier()
            return ColumnRef(table=first, column=second)
        return ColumnRef(table=None, column=first)

    def parse_aggregate_or_column(self) -> Union[ColumnRef, AggregateCall]:
        tok = self.peek()
        if tok is not None and tok.kind == KEYWORD and tok.text.upper() in _AGG_FUNCS:
            func = self.advance().text.upper()
            self.expect_punct("(")
            inner = self.peek()
            if inner is not None and inner.kind == PUNCTUATION and inner.text == "*":
                self.advance()
                arg: Union[ColumnRef, Star] = Star()
            else:
                arg = self.parse_column_ref()
            self.expect_punct(")")
            return AggregateCall(func=func, arg=arg)
        return self.parse_column_ref()

    def parse_value(self) -> Union[SqlLiteral, ColumnRef]:
        tok = self.peek()
        if tok is None:
            raise UnsupportedSyntax("expected a value, got end of statement")
        if tok.kind == LITERAL:
            self.advance()
            return SqlLiteral(text=tok.text, position=tok.position)
        if tok.kind == PUNCTUATION and tok.text == "-":
            minus = self.advance()
            num = self.peek()
            if num is None or num.kind != LITERAL or num.text.startswith("'"):
                raise UnsupportedSyntax("expected a number after '-'")
            self.advance()
            return SqlLiteral(text=f"-{num.text}", position=minus.position)
        if tok.kind == IDENTIFIER:
            return self.parse_column_ref()
        raise UnsupportedSyntax(f"expected a literal or column, got {tok.text!r}")

    def parse_condition(self) -> Condition:
        column = self.parse_column_ref()
        tok = self.peek()
        if tok is None or tok.kind != OPERATOR:
            got = tok.text if tok else "end of statement"
            raise UnsupportedSyntax(f"expected a comparison operator, got {got!r}")
        op = self.advance().text
        value = self.parse_value()
        return Condition(column=column, operator=op, value=value)

    def parse_select(self) -> ParsedQuery:
        tok = self.peek()
        if tok is None or tok.kind != DML or tok.text.upper() != "SELECT":
            got = tok.text if tok else "end of statement"
            raise UnsupportedSyntax(f"only SELECT statements are supported, got {got!r}")
        self.advance()
        query = ParsedQuery()
        query.distinct = self.take_word("DISTINCT")

        star = self.peek()
        if star is not None and star.kind == PUNCTUATION and star.text == "*":
            self.advance()
            query.select_items = [Star()]
        else:
            query.select_items = [self.parse_aggregate_or_column()]
            while self.peek() is not None and self.peek().kind == PUNCTUATION and self.peek().text == ",":
                self.advance()
                query.select_items.append(self.parse_aggregate_or_column())

        self.expect_word("FROM")
        query.from_table = self.parse_identifier()

        while self.at_word("JOIN", "INNER", "LEFT", "RIGHT", "OUTER", "FULL", "CROSS"):
            if not self.at_word("JOIN"):
                raise UnsupportedSyntax(f"only plain JOIN is supported, got {self.peek().text!r}")
            self.advance()
            join = Join(table=self.parse_identifier())
            if self.take_word("ON"):
                join.on.append(self.parse_condition())
                while self.take_word("AND"):
                    join.on.append(self.parse_condition())
            query.joins.append(join)

        tok = self.peek()
        if tok is not None and tok.kind == WHERE:
            self.advance()
            query.where_conditions.append(self.parse_condition())
            while self.at_word("AND", "OR"):
                query.where_connectors.append(self.advance().text.upper())
                query.where_conditions.append(self.parse_condition())

        if self.at_word("HAVING"):
            raise UnsupportedSyntax("HAVING is not supported")

        if self.take_word("GROUP"):
            self.expect_word("BY")
            query.group_by.append(self.parse_column_ref())
            while self.peek() is not None and self.peek().kind == PUNCTUATION and self.peek().text == ",":
                self.advance()
                query.group_by.append(self.parse_column_ref())

        if self.take_word("ORDER"):
            self.expect_word("BY")
            query.order_by.append(self._parse_order_item())
            while self.peek() is not None and self.peek().kind == PUNCTUATION and self.peek().text == ",":
                self.advance()
                query.order_by.append(self._parse_order_item())

        if self.take_word("LIMIT"):
            tok = self.peek()
            if tok is None or tok.kind != LITERAL or not tok.text.isdigit():
                got = tok.text if tok else "end of statement"
                raise UnsupportedSyntax(f"LIMIT expects an integer, got {got!r}")
            self.advance()
            query.limit = int(tok.text)

        return query

    def _parse_order_item(self) -> OrderItem:
        expr = self.parse_aggregate_or_column()
        direction = None
        if self.at_word("ASC", "DESC"):
            direction = self.advance().text.upper()
        return OrderItem(expr=expr, direction=direction)

    def expect_end(self) -> None:
        tok = self.peek()
        if tok is not None and tok.kind == PUNCTUATION and tok.text == ";":
            self.advance()
            tok = self.peek()
        if tok is not None:
            raise UnsupportedSyntax(f"unexpected trailing token {tok.text!r}")


def _precheck(tokens: list[SqlToken]) -> None:
    for i, tok in enumerate(tokens):
        upper = tok.text.upper()
        if tok.kind == KEYWORD and upper in _WINDOW_WORDS:
            raise UnsupportedSyntax(f"window functions are not supported ({tok.text})")
        if tok.kind == DML and upper == "SELECT" and i > 0:
            prev = tokens[i - 1]
            if prev.kind == PUNCTUATION and prev.text == "(":
                raise UnsupportedSyntax("nested subqueries are not supported")


def parse(sql: str, schema=None) -> ParsedQuery:
    """Parse SQL into a ParsedQuery; resolves unqualified columns when a
    schema is supplied. UnsupportedSyntax outside the frozen grammar,
    UnknownIdentifier for names missing from the schema."""
    tokens = [t for t in tokenize(sql) if t.kind != WHITESPACE]
    if not tokens:
        raise UnsupportedSyntax("empty statement")
    _precheck(tokens)
    parser = _Parser(tokens)
    left = parser.parse_select()
    query = left
    tok = parser.peek()
    if tok is not None and tok.kind == SET_OP:
        op = parser.advance().text.upper()
        if op == "EXCEPT":
            raise UnsupportedSyntax("EXCEPT is not supported")
        if parser.take_word("ALL"):
            raise UnsupportedSyntax(f"{op} ALL is not supported")
        right = parser.parse_select()
        nxt = parser.peek()
        if nxt is not None and nxt.kind == SET_OP:
            raise UnsupportedSyntax("only one top-level set operation is supported")
        query = ParsedQuery(set_op=SetOperation(op=op, left=left, right=right))
    parser.expect_end()
    if schema is not None:
        _resolve_against_schema(query, schema)
    return query


def _resolve_against_schema(query: ParsedQuery, schema) -> None:
    if query.set_op:
        _resolve_against_schema(query.set_op.left, schema)
        _resolve_against_schema(query.set_op.right, schema)
        return
    query_tables: list[str] = []
    for name in query.tables:
        table = schema.get_table(name)
        if table is None:
            raise UnknownIdentifier(f"unknown table {name!r}")
        query_tables.append(table.name)
    for ref in query.column_refs():
        if ref.table is not None:
            table = schema.get_table(ref.table)
            if table is None or table.name not in query_tables:
                raise UnknownIdentifier(f"unknown table {ref.table!r} for column {ref.column!r}")
            if table.column(ref.column) is None:
                raise UnknownIdentifier(f"unknown column {ref.table}.{ref.column}")
        else:
            owners = [t for t in query_tables if schema.find_column(t, ref.column) is not None]
            if not owners:
                raise UnknownIdentifier(f"unknown column {ref.column!r}")
            if len(owners) > 1:
                raise UnknownIdentifier(f"column {ref.column!r} is ambiguous across tables {owners}")
            ref.table = owners[0]


def find_terminals(parsed: ParsedQuery) -> list[tuple[int, ColumnRef]]:
    """Every WHERE condition whose literal is exactly 'Terminal', with the
    column it constrains, in textual order."""
    out: list[tuple[int, ColumnRef]] = []
    for index, cond in enumerate(parsed.all_conditions()):
        if isinstance(cond.value, SqlLiteral) and cond.value.text == TERMINAL_LITERAL:
            out.append((index, cond.column))
    return out


def render(parsed: ParsedQuery) -> str:
    """Canonical SQL for a ParsedQuery; re-parsing it yields an equal tree."""
    if parsed.set_op:
        return f"{render(parsed.set_op.left)} {parsed.set_op.op} {render(parsed.set_op.right)}"
    parts = ["SELECT"]
    if parsed.distinct:
        parts.append("DISTINCT")
    parts.append(", ".join(item.render() for item in parsed.select_items))
    parts.append("FROM")
    parts.append(_render_ident(parsed.from_table))
    for join in parsed.joins:
        parts.append("JOIN")
        parts.append(_render_ident(join.table))
        if join.on:
            parts.append("ON")
            parts.append(" AND ".join(cond.render() for cond in join.on))
    if parsed.where_conditions:
        parts.append("WHERE")
        rendered = [parsed.where_conditions[0].render()]
        for connector, cond in zip(parsed.where_connectors, parsed.where_conditions[1:]):
            rendered.append(connector)
            rendered.append(cond.render())
        parts.append(" ".join(rendered))
    if parsed.group_by:
        parts.append("GROUP BY")
        parts.append(", ".join(ref.render() for ref in parsed.group_by))
    if parsed.order_by:
        parts.append("ORDER BY")
        items = []
        for item in parsed.order_by:
            text = item.expr.render()
            if item.direction:
                text += f" {item.direction}"
            items.append(text)
        parts.append(", ".join(items))
    if parsed.limit is not None:
        parts.append(f"LIMIT {parsed.limit}")
    return " ".join(parts)
