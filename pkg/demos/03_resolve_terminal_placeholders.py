"""Fill in the 'Terminal' placeholders a translation model leaves behind.

Most text-to-SQL models cannot copy cell values out of the question, so the
generated SQL arrives with the literal 'Terminal' where a value belongs.
Resolution is dispatched on the column's type: fuzzy value matching for text
(edit-distance spell check plus unigram/bigram search over the column's
distinct values), positional numeral assignment for numbers, and yyyymmdd
insertion for dates.
"""

import datetime as dt
import tempfile
from pathlib import Path

from nlsql import CandidateSql, find_terminals, onboard_database, parse, resolve
from nlsql.executor import SqliteValueStore
from nlsql.temporal import normalize_query

workdir = Path(tempfile.mkdtemp())
source = workdir / "quakes.csv"
source.write_text(
    "place,longitude,depth\n"
    "Colorado,-105.5,12.1\n"
    "New Mexico,-106.3,8.0\n"
    "Alaska,-150.2,40.0\n"
)
db = onboard_database(source, dest_dir=workdir / "onboarded")
store = SqliteValueStore(db)
reference = dt.date(2021, 7, 15)

# A textual placeholder: the question even misspells the state.
question = normalize_query("How many quakes occur in Colorodo?", reference)
candidate = CandidateSql(
    sql="SELECT COUNT(*) FROM quakes WHERE quakes.place = 'Terminal'",
    backend_id="demo",
)
parsed = parse(candidate.sql, db)
print(find_terminals(parsed))   # [(0, quakes.place)]

result = resolve(question, candidate, db, store)
print(result.sql)               # ... quakes.place = 'Colorado'
print(result.replacements)      # method shows it was spell-corrected

# Numbers assign by the order they appear in the question, after converting
# English number words ("two" -> 2).
question = normalize_query("quakes deeper than ten but shallower than 35", reference)
candidate = CandidateSql(
    sql="SELECT quakes.place FROM quakes WHERE quakes.depth > 'Terminal' AND quakes.depth < 'Terminal'",
    backend_id="demo",
)
result = resolve(question, candidate, db, store)
print(result.sql)               # depth > 10 AND depth < 35

# When nothing in the question fits, the placeholder stays and the caller gets
# a warning urging the user to check the query.
question = normalize_query("Which places had a positive longitude value?", reference)
candidate = CandidateSql(
    sql="SELECT DISTINCT quakes.place FROM quakes WHERE quakes.longitude = 'Terminal'",
    backend_id="demo",
)
result = resolve(question, candidate, db, store)
print(result.sql)
print(result.warnings[0])
