import argparse
import logging
import sys
from typing import List, Optional

from entrograph import __version__
from entrograph.cli import commands_admin, commands_coding, commands_entropy, commands_orders
from entrograph.core.config import settings
from entrograph.core.errors import EntrographError, ExpressionError
from entrograph.core.logging_config import setup_logging

logger = logging.getLogger(__name__)


def common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration (JSON or key = value)")
    common.add_argument("--out", help="directory for CSV and JSON results")
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    common.add_argument("--seed", type=int, help="seed for randomized-order passes")
    common.add_argument("--threads", type=int, help="worker threads (ENTROGRAPH_THREADS)")
    common.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING, ...")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entrograph",
        description="Generalized entropy of dynamical systems: counts, codings and orders of growth.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = common_options()
    for module in (commands_entropy, commands_coding, commands_orders, commands_admin):
        module.register(subparsers, common)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    if args.threads is not None:
        settings.threads = args.threads
    if args.seed is not None:
        settings.seed = args.seed

    try:
        return args.handler(args)
    except ExpressionError as e:
        print(e.render(), file=sys.stderr)
        return e.exit_code
    except EntrographError as e:
        logger.error(f"❌ {e.message}")
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
