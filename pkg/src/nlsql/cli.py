"""Command-line entry points: onboard, query, explain, serve."""

from __future__ import annotations

import argparse
import datetime as dt
import json
import os
import sys
from pathlib import Path

from .errors import NlsqlError
from .explain import explain
from .onboarding import OnboardingConfig
from .service import QueryService, create_app
from .sqlparser import parse
from .translator import FixtureTranslator, RemoteTranslator

DEFAULT_DATA_DIR = os.environ.get("NLSQL_DATA_DIR", "nlsql_data")


def _build_translator(args: argparse.Namespace):
    if getattr(args, "backend", None):
        return RemoteTranslator(args.backend)
    if getattr(args, "fixtures", None):
        return FixtureTranslator(path=Path(args.fixtures))
    return FixtureTranslator(entries=[])


def _build_service(args: argparse.Namespace) -> QueryService:
    return QueryService(Path(args.data_dir), _build_translator(args))


def _cmd_onboard(args: argparse.Namespace) -> int:
    config = OnboardingConfig()
    if args.config:
        config = OnboardingConfig.from_json(json.loads(Path(args.config).read_text(encoding="utf-8")))
    service = _build_service(args)
    db = service.onboard(Path(args.file), config, name=args.name)
    print(db.id)
    return 0


def _print_table(result: dict) -> None:
    names = [c["name"] for c in result["columns"]]
    widths = [len(n) for n in names]
    rows = [["" if v is None else str(v) for v in row] for row in result["rows"]]
    for row in rows:
        widths = [max(w, len(v)) for w, v in zip(widths, row)]
    line = "  ".join(n.ljust(w) for n, w in zip(names, widths))
    print(line)
    print("-" * len(line))
    for row in rows:
        print("  ".join(v.ljust(w) for v, w in zip(row, widths)))
    if result["truncated"]:
        print(f"... truncated at {result['row_count']} rows")


def _cmd_query(args: argparse.Namespace) -> int:
    service = _build_service(args)
    reference = dt.datetime.fromisoformat(args.reference_time) if args.reference_time else None
    response = service.query(args.database, args.text, reference_time=reference)
    print(f"SQL: {response.sql}")
    print(f"Explanation: {response.explanation}")
    for warning in response.warnings:
        print(f"Warning: {warning}")
    if response.result is not None:
        print()
        _print_table(response.result.to_json())
    if response.visualizations:
        print("\nSuggested charts:")
        for spec in response.visualizations:
            y = "row count" if spec["y"] == "*" else spec["y"]
            agg = "" if spec["aggregate"] == "none" else f" ({spec['aggregate']})"
            print(f"  {spec['type']}: x={spec['x']}, y={y}{agg}  score={spec['score']}")
    return 0


def _cmd_explain(args: argparse.Namespace) -> int:
    print(explain(parse(args.sql)).render())
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    app = create_app(_build_service(args), ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="nlsql", description="Ask databases questions in English.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_onboard = sub.add_parser("onboard", help="register a csv or SQLite file")
    p_onboard.add_argument("file")
    p_onboard.add_argument("--config", help="onboarding config JSON file")
    p_onboard.add_argument("--name", default=None)
    p_onboard.add_argument("--data-dir", default=DEFAULT_DATA_DIR)
    p_onboard.set_defaults(func=_cmd_onboard)

    p_query = sub.add_parser("query", help="run a plain-English question")
    p_query.add_argument("database", help="database id from onboard")
    p_query.add_argument("text")
    p_query.add_argument("--data-dir", default=DEFAULT_DATA_DIR)
    p_query.add_argument("--fixtures", help="fixture translations JSON file")
    p_query.add_argument("--backend", help="remote translator base URL")
    p_query.add_argument("--reference-time", help="ISO timestamp for relative dates")
    p_query.set_defaults(func=_cmd_query)

    p_explain = sub.add_parser("explain", help="summarize a SQL statement in plain English")
    p_explain.add_argument("sql")
    p_explain.set_defaults(func=_cmd_explain)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--data-dir", default=DEFAULT_DATA_DIR)
    p_serve.add_argument("--fixtures", help="fixture translations JSON file")
    p_serve.add_argument("--backend", help="remote translator base URL")
    p_serve.add_argument("--ui", help="directory with the built web UI (serves it at /)")
    p_serve.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NlsqlError as exc:
        print(f"error ({exc.kind}): {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
