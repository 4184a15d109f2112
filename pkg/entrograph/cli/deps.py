import logging
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional

from entrograph.core.config import settings
from entrograph.core.db import Database
from entrograph.schemas.report import RunConfig
from entrograph.schemas.run import RunCreate
from entrograph.services.report_service import ReportService
from entrograph.services.run_service import RunService

logger = logging.getLogger(__name__)


class RunHandle:
    """What a command reports back to the ledger when it finishes."""

    def __init__(self) -> None:
        self.aggregate: Optional[str] = None
        self.wall_time: Optional[float] = None


def apply_settings(config: RunConfig) -> None:
    settings.seed = config.seed
    settings.threads = config.threads
    if config.linear_band is not None:
        settings.linear_band = tuple(config.linear_band)
    if config.tail_fraction is not None:
        settings.tail_fraction = config.tail_fraction


def config_from_args(args: Any, command: str, extra: Optional[Dict[str, Any]] = None) -> RunConfig:
    overrides: Dict[str, Any] = {
        "command": command,
        "seed": args.seed,
        "threads": args.threads,
        "out": args.out,
    }
    overrides.update(extra or {})
    config = ReportService.load_config(args.config, overrides)
    apply_settings(config)
    return config


@contextmanager
def recorded_run(command: str, system: Optional[str] = None, config_hash: Optional[str] = None) -> Iterator[RunHandle]:
    """Record a command in the run ledger; ledger trouble never fails the command."""
    handle = RunHandle()
    if not settings.record_runs:
        yield handle
        return

    database, run_id = None, None
    try:
        database = Database()
        database.create_all()
        session = database.session_factory()
        run_id = RunService.create_run(session, RunCreate(command=command, system=system, config_hash=config_hash)).id
        logger.debug(f"📋 run {run_id}: {command}")
    except Exception as e:
        logger.warning(f"⚠️ run ledger unavailable (non-critical): {e}")

    try:
        yield handle
    except Exception as e:
        if run_id is not None:
            RunService.fail_run(session, run_id, str(e))
        raise
    else:
        if run_id is not None:
            RunService.finish_run(session, run_id, aggregate=handle.aggregate, wall_time=handle.wall_time)
    finally:
        if run_id is not None:
            session.close()
