import argparse
import json
import logging
from typing import Any, Dict

from entrograph.core.config import settings
from entrograph.core.errors import InvalidInputError
from entrograph.schemas.growth import GrowthSeries
from entrograph.services.expr_parser import parse_sequence
from entrograph.services.growth_service import GrowthService
from entrograph.services.report_service import ReportService

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 256


def register(subparsers: Any, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("orders", help="orders of growth of closed-form sequences")
    orders = parser.add_subparsers(dest="action", required=True)

    compare = orders.add_parser("compare", parents=[common], help="[a] vs [b]")
    compare.add_argument("--a", required=True)
    compare.add_argument("--b", required=True)
    compare.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    compare.set_defaults(handler=cmd_compare)

    project = orders.add_parser("project", parents=[common], help="polynomial or exponential projection")
    project.add_argument("--p", required=True, dest="expression")
    project.add_argument("--kind", choices=["poly", "exp"], default="poly")
    project.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    project.set_defaults(handler=cmd_project)

    sup = orders.add_parser("sup", parents=[common], help="pointwise sup of several sequences")
    sup.add_argument("expressions", nargs="+")
    sup.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    sup.set_defaults(handler=cmd_sup)

    invariance = orders.add_parser("invariance", parents=[common], help="is [a(n)] = [a(mn)]?")
    invariance.add_argument("--a", required=True)
    invariance.add_argument("--m", type=int, default=2)
    invariance.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    invariance.set_defaults(handler=cmd_invariance)

    classify = orders.add_parser("classify", parents=[common], help="growth class of an expression or a CSV column")
    source = classify.add_mutually_exclusive_group(required=True)
    source.add_argument("--a")
    source.add_argument("--csv")
    classify.add_argument("--column", default="s")
    classify.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    classify.set_defaults(handler=cmd_classify)


def _emit(args: argparse.Namespace, payload: Dict[str, Any], text: str) -> int:
    print(json.dumps(payload, sort_keys=True) if args.json else text)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    a, b = parse_sequence(args.a, args.horizon), parse_sequence(args.b, args.horizon)
    verdict = GrowthService.compare(a, b)
    return _emit(args, verdict.model_dump(mode="json"), verdict.relation.value)


def cmd_project(args: argparse.Namespace) -> int:
    series = parse_sequence(args.expression, args.horizon)
    project = GrowthService.project_poly if args.kind == "poly" else GrowthService.project_exp
    value = round(project(series), 6)
    return _emit(args, {"kind": args.kind, "value": value}, str(value))


def cmd_sup(args: argparse.Namespace) -> int:
    series = GrowthService.sup([parse_sequence(e, args.horizon) for e in args.expressions])
    growth = GrowthService.classify(series)
    return _emit(args, {"values": series.values, "class": growth.model_dump(mode="json")}, growth.label.value)


def cmd_invariance(args: argparse.Namespace) -> int:
    invariant, verdict = GrowthService.is_linearly_invariant(parse_sequence(args.a, args.horizon), args.m)
    payload = {"invariant": invariant, "verdict": verdict.model_dump(mode="json")}
    return _emit(args, payload, str(invariant).lower())


def cmd_classify(args: argparse.Namespace) -> int:
    if args.csv:
        series: GrowthSeries = ReportService.read_series_csv(args.csv, args.column)
    else:
        series = parse_sequence(args.a, args.horizon)
    if series.horizon < 16:
        raise InvalidInputError(f"classification needs at least 16 values, got {series.horizon}")
    growth = GrowthService.classify(series)
    text = f"{growth.label.value} (degree {growth.degree:.3f}, rate {growth.rate:.4f}, tail {settings.tail_fraction})"
    return _emit(args, growth.model_dump(mode="json"), text)
