"""Render a parsed SELECT as a one-line plain-English summary.

Format: ``Column(s): <projections> Table(s): <tables>`` followed by
``, Filtered on: ...``, ``, Grouped by: ...``, ``, Ordered by: ...`` and
``, Top: N`` when those clauses are present. INTERSECT/UNION queries are
summarized part by part and joined with the operator name.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .sqlparser import ParsedQuery, Star


@dataclass(frozen=True)
class Explanation:
    columns: str
    tables: str
    filters: Optional[str] = None
    grouped_by: Optional[str] = None
    ordered_by: Optional[str] = None
    top: Optional[int] = None
    set_op_parts: Optional[tuple[str, "Explanation", "Explanation"]] = None

    def render(self) -> str:
        if self.set_op_parts:
            op, left, right = self.set_op_parts
            return f"{left.render()} {op} {right.render()}"
        text = f"Column(s): {self.columns} Table(s): {self.tables}"
        if self.filters:
            text += f", Filtered on: {self.filters}"
        if self.grouped_by:
            text += f", Grouped by: {self.grouped_by}"
        if self.ordered_by:
            text += f", Ordered by: {self.ordered_by}"
        if self.top is not None:
            text += f", Top: {self.top}"
        return text

    def to_json(self) -> dict:
        if self.set_op_parts:
            op, left, right = self.set_op_parts
            return {"set_op": op, "left": left.to_json(), "right": right.to_json(),
                    "text": self.render()}
        return {
            "columns": self.columns,
            "tables": self.tables,
            "filters": self.filters,
            "grouped_by": self.grouped_by,
            "ordered_by": self.ordered_by,
            "top": self.top,
            "text": self.render(),
        }


def explain(parsed: ParsedQuery) -> Explanation:
    """Total over everything parse() accepts."""
    if parsed.set_op:
        return Explanation(
            columns="", tables="",
            set_op_parts=(parsed.set_op.op,
                          explain(parsed.set_op.left),
                          explain(parsed.set_op.right)),
        )
    if len(parsed.select_items) == 1 and isinstance(parsed.select_items[0], Star):
        columns = "All"
    else:
        columns = ", ".join(item.render() for item in parsed.select_items)
    tables = ", ".join(parsed.tables)
    filters = None
    if parsed.where_conditions:
        rendered = [parsed.where_conditions[0].render()]
        for connector, cond in zip(parsed.where_connectors, parsed.where_conditions[1:]):
            rendered.append(connector)
            rendered.append(cond.render())
        filters = " ".join(rendered)
    grouped = ", ".join(ref.render() for ref in parsed.group_by) or None
    ordered = None
    if parsed.order_by:
        parts = []
        for item in parsed.order_by:
            text = item.expr.render()
            if item.direction:
                text += f" {item.direction}"
            parts.append(text)
        ordered = ", ".join(parts)
    return Explanation(
        columns=columns,
        tables=tables,
        filters=filters,
        grouped_by=grouped,
        ordered_by=ordered,
        top=parsed.limit,
    )
