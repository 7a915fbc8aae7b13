"""Summarize generated SQL in plain English for non-technical readers."""

from nlsql import explain, parse

queries = [
    "SELECT * from customers where customers.region = 'INDIA'",
    "SELECT customer.email FROM customer WHERE customer.first_name = 'MARY'",
    "SELECT matches.team1 FROM matches GROUP BY matches.team1 ORDER BY COUNT(*) DESC LIMIT 1",
    "SELECT a.x FROM a UNION SELECT b.x FROM b",
]

for sql in queries:
    print(sql)
    print("  ->", explain(parse(sql)).render())
    print()

# The explanation is also available as a structured object for UIs.
doc = explain(parse(queries[1])).to_json()
print({k: v for k, v in doc.items() if v is not None})
