"""The whole journey: question in, SQL + table + explanation + charts out.

Uses the deterministic fixture translator (a JSON lookup standing in for the
neural model) so the demo runs offline. Swap in RemoteTranslator("http://...")
to talk to a real translation backend over POST /translate.
"""

import datetime as dt
import tempfile
from pathlib import Path

from nlsql import FixtureTranslator, QueryService

workdir = Path(tempfile.mkdtemp())
source = workdir / "customer.csv"
source.write_text(
    "email,first_name\n"
    "mary.smith@example.com,MARY\n"
    "john.doe@example.com,JOHN\n"
    "linda.w@example.com,LINDA\n"
)

question = "What are the email addresses of the customer whose first name is MARY?"
translator = FixtureTranslator([
    # The model emits 'Terminal' where the cell value belongs; the
    # post-processing pipeline restores MARY from the question.
    {"pattern": question,
     "sql": "SELECT customer.email FROM customer WHERE customer.first_name = 'Terminal'"},
])

service = QueryService(workdir / "data", translator)
db = service.onboard(source, name="customers")
print("onboarded:", db.id)

response = service.query(db.id, question, reference_time=dt.datetime(2021, 7, 15))
print("SQL:        ", response.sql)
print("explanation:", response.explanation)
print("rows:       ", response.result.rows)
print("from cache: ", response.from_cache)

# Asking again skips model inference entirely.
again = service.query(db.id, question, reference_time=dt.datetime(2021, 7, 15))
print("second time from cache:", again.from_cache)

# Both runs are in the history (newest first), which also backs the cache.
for entry in service.history(db.id):
    print("history:", entry.timestamp, entry.raw_query[:40], "->", entry.resolved_sql[:40])

# The result is downloadable as RFC 4180 csv for one hour.
print(service.result_csv(response.result_id).decode("utf-8"))

# To serve all of this over HTTP (plus the upload endpoint the web UI uses):
#   nlsql serve --port 8000 --fixtures fixtures.json
# or programmatically:
#   import uvicorn; from nlsql import create_app
#   uvicorn.run(create_app(service), port=8000)
