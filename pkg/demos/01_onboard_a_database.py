"""Onboard a csv file: clean identifiers, add synonyms, expand a datetime column.

Every identifier the translation model will see must be plain English
snake_case, synonyms boost the model's schema linking, and datetime columns
are split so month/year questions become simple equality filters.
"""

import json
import tempfile
from pathlib import Path

from nlsql import OnboardingConfig, clean_identifier, onboard_database

# Identifier cleaning on its own: spaces and punctuation become underscores.
print(clean_identifier("toss winner"))        # toss_winner
print(clean_identifier("Order-Date (UTC)"))   # order_date_utc

workdir = Path(tempfile.mkdtemp())
source = workdir / "invoices.csv"
source.write_text(
    "PCs,Unit Price,Invoice Date,heading\n"
    "3,19.99,2021-06-04,summer promo\n"
    "7,5.25,2021-07-15,back to school\n"
    "2,99.00,2020-10-04,clearance\n"
)

# The human supplies the domain knowledge: an English rename for the cryptic
# "PCs" column, synonyms for "heading", and the datetime format.
config = OnboardingConfig(
    renames={"PCs": "quantity"},
    synonym_map={"heading": ["title", "headline"]},
    datetime_columns={"Invoice Date": "yyyy-mm-dd"},
)

db = onboard_database(source, config, dest_dir=workdir / "onboarded")

table = db.tables[0]
print([c.cleaned_name for c in table.columns])
# ['quantity', 'unit_price', 'invoice_date', 'heading_title_headline',
#  'invoice_date_day', 'invoice_date_month', 'invoice_date_year',
#  'invoice_date_month_name_short', 'invoice_date_month_name_long']

# The rename ledger maps every original identifier to its final form, so a UI
# can always show users the names they uploaded.
print(json.dumps(db.rename_ledger.to_json(), indent=2))

# The onboarded store is a normal SQLite file with the derived columns
# materialized; the schema sidecar sits next to it.
print(db.store_path)
print(sorted(p.name for p in db.store_path.parent.iterdir()))
