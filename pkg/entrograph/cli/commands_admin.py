import argparse
import json
import logging
from typing import Any

import pandas as pd

from entrograph.cli.deps import recorded_run
from entrograph.core.db import Database, get_session
from entrograph.services.report_service import ReportService
from entrograph.services.run_service import RunService
from entrograph.services.verify_service import VerifyService
from entrograph.systems.catalog import SYSTEMS, get_system

logger = logging.getLogger(__name__)

SUITES = ["parabolic", "brouwer", "properties", "coding", "double-arrow", "all"]


def register(subparsers: Any, common: argparse.ArgumentParser) -> None:
    verify = subparsers.add_parser("verify", parents=[common], help="run an acceptance bundle")
    verify.add_argument("suite", choices=SUITES)
    verify.set_defaults(handler=cmd_verify)

    systems = subparsers.add_parser("systems", parents=[common], help="list the catalog")
    systems.set_defaults(handler=cmd_systems)

    runs = subparsers.add_parser("runs", parents=[common], help="recent run ledger entries")
    runs.add_argument("--limit", type=int, default=10)
    runs.set_defaults(handler=cmd_runs)

    schema = subparsers.add_parser("schema", parents=[common], help="JSON schema of the report documents")
    schema.set_defaults(handler=cmd_schema)


def cmd_verify(args: argparse.Namespace) -> int:
    with recorded_run(f"verify {args.suite}") as run:
        results = VerifyService.run(args.suite)
        passed = all(r.passed for r in results)
        run.aggregate = "passed" if passed else "failed"

    if args.json:
        print(json.dumps([r.model_dump(mode="json") for r in results], indent=2, sort_keys=True))
    else:
        table = pd.DataFrame({"check": [r.name for r in results], "passed": [r.passed for r in results]})
        print(table.to_string(index=False))
    return 0 if passed else 1


def cmd_systems(args: argparse.Namespace) -> int:
    rows = []
    for name in SYSTEMS:
        system = get_system(name)
        expected = system.expected_class.label.value if system.expected_class else None
        rows.append(
            {
                "system": name,
                "invertible": system.invertible,
                "expected": expected,
                "levels": list(system.default_levels),
                "compacts": system.compact_names(),
                "shapes": list(system.shape_kinds),
            }
        )
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(pd.DataFrame(rows).to_string(index=False))
    return 0


def cmd_runs(args: argparse.Namespace) -> int:
    database = Database()
    database.create_all()
    for session in get_session(database):
        runs = RunService.recent_runs(session, limit=args.limit)
    if args.json:
        print(json.dumps([r.model_dump(mode="json") for r in runs], indent=2))
    elif not runs:
        print("no runs recorded")
    else:
        columns = ["id", "command", "system", "status", "aggregate", "wall_time", "started_at"]
        print(pd.DataFrame([r.model_dump() for r in runs])[columns].to_string(index=False))
    return 0


def cmd_schema(args: argparse.Namespace) -> int:
    print(json.dumps(ReportService.schema_document(), indent=2, sort_keys=True))
    return 0
