import sqlite3
from pathlib import Path

import pytest

from nlsql.onboarding import OnboardingConfig, onboard_database


def write_csv(path: Path, header: list[str], rows: list[list]) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if v is None else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def customer_db(tmp_path_factory):
    """Single-table customer database with a MARY row."""
    base = tmp_path_factory.mktemp("customer")
    source = write_csv(
        base / "customer.csv",
        ["email", "first_name"],
        [
            ["mary.smith@example.com", "MARY"],
            ["john.doe@example.com", "JOHN"],
            ["linda.w@example.com", "LINDA"],
            ["barbara.j@example.com", "BARBARA"],
        ],
    )
    return onboard_database(source, OnboardingConfig(), dest_dir=base / "onboarded")


@pytest.fixture(scope="session")
def movies_db(tmp_path_factory):
    """Multi-table SQLite source: actor / film / film_actor with JOHNNY."""
    base = tmp_path_factory.mktemp("movies")
    source = base / "movies.sqlite"
    conn = sqlite3.connect(source)
    conn.executescript(
        """
        CREATE TABLE actor (actor_id INTEGER, first_name TEXT, last_name TEXT);
        CREATE TABLE film (film_id INTEGER, title TEXT);
        CREATE TABLE film_actor (actor_id INTEGER, film_id INTEGER);
        INSERT INTO actor VALUES (1, 'JOHNNY', 'LOLLOBRIGIDA'), (2, 'PENELOPE', 'GUINESS'),
                                 (3, 'NICK', 'WAHLBERG');
        INSERT INTO film VALUES (10, 'ACE GOLDFINGER'), (11, 'ALIEN CENTER'), (12, 'BANG KWAI');
        INSERT INTO film_actor VALUES (1, 10), (1, 11), (2, 12), (3, 12);
        """
    )
    conn.commit()
    conn.close()
    return onboard_database(source, OnboardingConfig(), dest_dir=base / "onboarded")


@pytest.fixture(scope="session")
def quakes_db(tmp_path_factory):
    base = tmp_path_factory.mktemp("quakes")
    source = write_csv(
        base / "quakes.csv",
        ["place", "longitude", "depth"],
        [
            ["Colorado", "-105.5", "12.1"],
            ["Alaska", "-150.2", "40.0"],
            ["Nevada", "-116.9", "7.3"],
            ["Hawaii", "-155.4", "32.8"],
        ],
    )
    return onboard_database(source, OnboardingConfig(), dest_dir=base / "onboarded")


@pytest.fixture(scope="session")
def clicks_db(tmp_path_factory):
    base = tmp_path_factory.mktemp("clicks")
    source = write_csv(
        base / "customers.csv",
        ["customer_id", "ad_clicks"],
        [["1", "0"], ["2", "2"], ["3", "5"], ["4", "1"], ["5", "3"]],
    )
    return onboard_database(source, OnboardingConfig(), dest_dir=base / "onboarded")


@pytest.fixture(scope="session")
def sales_db(tmp_path_factory):
    """Sales table with a datetime column expanded at onboarding."""
    base = tmp_path_factory.mktemp("sales")
    source = write_csv(
        base / "sales.csv",
        ["region", "revenue", "invoice_date"],
        [
            ["north", "120.5", "2021-06-04"],
            ["south", "80.0", "2021-06-18"],
            ["north", "95.25", "2021-07-02"],
            ["east", "132.0", "2021-07-15"],
            ["west", "20.75", "2020-10-04"],
            ["south", "61.0", "2020-11-23"],
        ],
    )
    config = OnboardingConfig(datetime_columns={"invoice_date": "yyyy-mm-dd"})
    return onboard_database(source, config, dest_dir=base / "onboarded")
