import argparse
import logging
import sys
from typing import Any, Dict, List

from entrograph.cli.deps import config_from_args, recorded_run
from entrograph.core.errors import InvalidInputError
from entrograph.schemas.profile import ProfileStatus
from entrograph.services.entropy_service import EntropyService
from entrograph.services.report_service import ReportService, parse_value
from entrograph.systems.catalog import get_system

logger = logging.getLogger(__name__)

EXIT_UNSTABLE = 2
DEFAULT_OUT = "results"


def parse_params(pairs: List[str]) -> Dict[str, Any]:
    """`key=value` system parameters; values are read as JSON when they parse."""
    params = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise InvalidInputError(f"system parameter must be key=value, got '{pair}'")
        key, value = pair.split("=", 1)
        params[key.strip()] = parse_value(value.strip())
    return params


def register(subparsers: Any, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("entropy", parents=[common], help="separated-set counts and growth class of a system")
    parser.add_argument("--system", help="catalog name (see `systems`)")
    parser.add_argument("--param", action="append", default=None, metavar="KEY=VALUE", help="system parameter, repeatable")
    parser.add_argument("--compact", help="compact selector, '+' joins pieces (default: default)")
    parser.add_argument("--levels", help="levels as 4..8 or 4,5,6 (default: per system)")
    parser.add_argument("--horizon", type=int, help="largest n (>= 16)")
    parser.set_defaults(handler=cmd_entropy)


def cmd_entropy(args: argparse.Namespace) -> int:
    extra = {"system": args.system, "compact": args.compact, "levels": args.levels, "horizon": args.horizon}
    if args.param:
        extra["params"] = parse_params(args.param)
    config = config_from_args(args, "entropy", extra)

    system = get_system(config.system, **config.params)
    levels = config.levels or list(system.default_levels)
    config = config.model_copy(update={"levels": levels})

    with recorded_run("entropy", config.system, ReportService.config_hash(config)) as run:
        profile = EntropyService.restricted_profile(system, config.compact, levels, config.horizon)
        report = ReportService.entropy_report(config, profile)
        ReportService.write(config.out or DEFAULT_OUT, "entropy", report, ReportService.profile_frame(profile))
        run.aggregate = profile.aggregate.label.value if profile.aggregate else profile.status.value
        run.wall_time = report.timing.wall_time

    if args.json:
        sys.stdout.write(ReportService.render(report))
    else:
        for level in report.levels:
            c = level.growth_class
            print(f"k={level.k:<3} {c.label.value:<12} degree={c.degree:.3f} rate={c.rate:.4f} sandwich={level.sandwich_ok}")
        aggregate = profile.aggregate.label.value if profile.aggregate else "-"
        print(f"aggregate: {aggregate} ({profile.status.value})")
    return EXIT_UNSTABLE if profile.status == ProfileStatus.UNSTABLE else 0
