"""Operator entry point.

Subcommands:
  serve   --config PATH                      run the poller plus the review API
  sync    --course ID [--config PATH]        one poll cycle for a course
  replay  --fixture DIR --script PATH        scripted end-to-end run against mocks
  export  --out PATH [--course ID] [--config PATH]   dump the store as NDJSON
  report  --survey CSV                       print Likert tables for a survey file

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .analytics import aggregate_survey, format_likert_table, survey_ingest
from .api import create_app
from .config import load_config
from .errors import TaideskError
from .replay import run_replay
from .service import Service
from .store import ExportFilter, FileStore, MemoryStore

DEFAULT_CONFIG = "taidesk.json"

USAGE_EXIT = 1
RUNTIME_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="taidesk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the poller and the review API")
    serve.add_argument("--config", default=DEFAULT_CONFIG)

    sync = sub.add_parser("sync", help="run one poll cycle for a course")
    sync.add_argument("--course", required=True)
    sync.add_argument("--config", default=DEFAULT_CONFIG)

    replay = sub.add_parser("replay", help="replay a fixture with scripted decisions")
    replay.add_argument("--fixture", required=True)
    replay.add_argument("--script", required=True)

    export = sub.add_parser("export", help="export stored records as NDJSON")
    export.add_argument("--out", required=True, help="output path, or - for stdout")
    export.add_argument("--course", default=None)
    export.add_argument("--config", default=DEFAULT_CONFIG)

    report = sub.add_parser("report", help="print Likert tables for a survey CSV")
    report.add_argument("--survey", required=True)

    return parser


def _build_service(config_path: str, mode: str) -> Service:
    config = load_config(config_path)
    store = FileStore(config.storage_path) if config.storage_path else MemoryStore()
    return Service(config, store, mode=mode)


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    service = _build_service(args.config, mode="async")
    host, _, port = service.config.bind.partition(":")
    app = create_app(service, service.config.reviewers)
    service.start_pollers()
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8787), log_level="info")
    finally:
        service.stop()
    return 0


def cmd_sync(args: argparse.Namespace) -> int:
    service = _build_service(args.config, mode="sync")
    try:
        created = service.sync_course(args.course)
    except KeyError:
        print(f"no course {args.course} in {args.config}", file=sys.stderr)
        return RUNTIME_EXIT
    for item_id in created:
        print(item_id)
    print(f"created {len(created)} work item(s)")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    result = run_replay(args.fixture, args.script)
    print(result.report)
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    store = FileStore(config.storage_path) if config.storage_path else MemoryStore()
    flt = ExportFilter(course_id=args.course)
    redact = config.secret_values()
    if args.out == "-":
        count = store.export_json(sys.stdout, flt, redact)
    else:
        with Path(args.out).open("w", encoding="utf-8") as fh:
            count = store.export_json(fh, flt, redact)
    print(f"exported {count} record(s)", file=sys.stderr)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    rows = survey_ingest(args.survey)
    tables = aggregate_survey(rows)
    if not tables:
        print("no responses in survey file", file=sys.stderr)
        return RUNTIME_EXIT
    print("\n\n".join(format_likert_table(t) for t in tables))
    return 0


_COMMANDS = {
    "serve": cmd_serve,
    "sync": cmd_sync,
    "replay": cmd_replay,
    "export": cmd_export,
    "report": cmd_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except TaideskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    raise SystemExit(main())
