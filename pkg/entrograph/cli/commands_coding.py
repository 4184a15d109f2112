import argparse
import logging
import sys
import time
from typing import Any

from entrograph.cli.commands_entropy import DEFAULT_OUT, parse_params
from entrograph.cli.deps import config_from_args, recorded_run
from entrograph.core.errors import InvalidInputError
from entrograph.schemas.growth import GrowthSeries
from entrograph.schemas.report import CodingSummary
from entrograph.services.coding_service import CodingService
from entrograph.services.growth_service import GrowthService
from entrograph.services.report_service import ReportService
from entrograph.services.verify_service import load_family
from entrograph.systems.catalog import get_system

logger = logging.getLogger(__name__)


def register(subparsers: Any, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("coding", parents=[common], help="orbit codings of a family of wandering sets")
    parser.add_argument("--system", help="catalog name")
    parser.add_argument("--param", action="append", default=None, metavar="KEY=VALUE")
    parser.add_argument("--family", help="family JSON file, or the name of a bundled family")
    parser.add_argument("--horizon", type=int, help="largest word length (>= 16)")
    parser.add_argument("--n0-max", type=int, dest="n0_max", help="largest separation for the singularity probe")
    parser.add_argument("--search-bound", type=int, dest="search_bound", help="orbit length searched for witnesses")
    parser.add_argument("--sampled", action="store_true", help="use sampled orbits even when the exact path applies")
    parser.set_defaults(handler=cmd_coding)


def cmd_coding(args: argparse.Namespace) -> int:
    extra = {
        "system": args.system,
        "family": args.family,
        "horizon": args.horizon,
        "n0_max": args.n0_max,
        "search_bound": args.search_bound,
    }
    if args.param:
        extra["params"] = parse_params(args.param)
    config = config_from_args(args, "coding", extra)
    if not config.family:
        raise InvalidInputError("coding needs --family")

    system = get_system(config.system, **config.params)
    family = load_family(config.family)
    CodingService.validate_family(system, family)
    horizon = config.horizon
    search_bound = config.search_bound or horizon
    universe = CodingService.family_universe(system, family, max(horizon, search_bound)) if args.sampled else None

    started = time.perf_counter()
    with recorded_run("coding", config.system, ReportService.config_hash(config)) as run:
        counts = CodingService.codings_count(system, family, horizon, universe)
        wandering = [CodingService.wandering_check(system, m, horizon, universe) for m in family.members]
        visits = []
        if system.invertible:
            visits = [CodingService.max_visits(system, m, horizon, universe) for m in family.members]

        hitting, d_lower, singularity = [], None, None
        if len(family.members) > 1:
            hitting = CodingService.hitting_sets(system, family, horizon, universe)
            d_lower = GrowthService.sup([CodingService.d_lower_bound(h, horizon) for h in hitting])
            if family.disjoint:
                singularity = CodingService.mutually_singular_probe(system, family, config.n0_max, search_bound, universe)

        linear = GrowthSeries.from_function(float, horizon, label="n")
        summary = CodingSummary(
            counts=counts,
            growth_class=GrowthService.classify(counts.series),
            versus_linear=GrowthService.compare(counts.series, linear),
            wandering=wandering,
            max_visits=visits,
            hitting=hitting,
            singularity=singularity,
        )
        report = ReportService.coding_report(config, system.name, summary, time.perf_counter() - started)
        ReportService.write(config.out or DEFAULT_OUT, "coding", report, ReportService.coding_frame(counts, d_lower))
        run.aggregate = summary.growth_class.label.value
        run.wall_time = report.timing.wall_time

    if args.json:
        sys.stdout.write(ReportService.render(report))
        return 0

    print(f"c({horizon}) = {counts.series.values[-1]:.0f} [{'exact' if counts.exact else 'sampled'}], class {summary.growth_class.label.value}")
    print(f"versus n: {summary.versus_linear.relation.value}")
    for w in wandering:
        state = "wandering" if w.wandering else f"returns at n={w.first_return}"
        print(f"  {w.label}: {state}")
    if singularity is not None:
        print(f"singular: {str(singularity.singular).lower()} (max gap {singularity.max_gap}, certified bound {singularity.certified_bound})")
    return 0
