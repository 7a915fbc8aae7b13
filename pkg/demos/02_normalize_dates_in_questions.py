"""Standardize the many ways people write dates before translation.

The model has no robust sense of time, so "4th July", "June, 2021" and
"last month" are rewritten into two standard shapes: yyyymmdd for full dates
and "Month: <name>, Year: <yyyy>" (or "Year: <yyyy>") for coarser mentions.
Relative phrases resolve against an injected reference time, which keeps
everything reproducible.
"""

import datetime as dt

from nlsql import normalize_query, recognize_temporal

reference = dt.date(2021, 7, 15)

for question in [
    "sales on 4th July 2021",
    "total revenue in June, 2021",
    "total revenue in year 2020",
    "orders last month",
    "sales yesterday",
    "revenue by region",          # nothing temporal: untouched
]:
    print(f"{question!r:42} -> {normalize_query(question, reference).normalized!r}")

# The recognizer exposes the raw spans too, with what each one resolved to.
spans = recognize_temporal("from June, 2020 to 4th July 2021", reference)
for span in spans:
    print(span)

# Normalization is idempotent: already-standard text is never rewritten again.
once = normalize_query("orders last month", reference).normalized
twice = normalize_query(once, reference).normalized
assert once == twice == "orders Month: June, Year: 2021"
print("idempotent:", once)
