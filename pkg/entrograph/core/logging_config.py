import logging
import sys
from pathlib import Path
from typing import Optional

from loguru import logger

from entrograph.core.config import settings


class LoguruHandler(logging.Handler):
    """Route stdlib logging records into loguru, keeping the caller's location."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            level = logger.level(record.levelname).name
        except ValueError:
            level = record.levelno

        frame, depth = logging.currentframe(), 2
        while frame is not None and frame.f_code.co_filename == logging.__file__:
            frame = frame.f_back
            depth += 1

        logger.opt(depth=depth, exception=record.exc_info).log(level, record.getMessage())


def setup_logging(level: Optional[str] = None, log_dir: Optional[str] = None) -> None:
    level = (level or settings.log_level).upper()

    # Remove default loguru sink
    logger.remove()

    # Console sink
    logger.add(
        sys.stderr,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>",
        level=level,
        backtrace=True,
        diagnose=False,
    )

    # File sink
    log_path = Path(log_dir or settings.log_dir)
    log_path.mkdir(parents=True, exist_ok=True)

    logger.add(
        log_path / "entrograph.log",
        rotation="10 MB",
        retention="7 days",
        level="DEBUG",
        backtrace=True,
        diagnose=False,
    )

    logging.basicConfig(handlers=[LoguruHandler()], level=logging.DEBUG, force=True)
