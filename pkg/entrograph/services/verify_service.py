import logging
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from entrograph.core.config import settings
from entrograph.core.errors import EntrographError, InvalidInputError
from entrograph.schemas.coding import CodingFamily, HittingData
from entrograph.schemas.growth import GrowthLabel, GrowthSeries, Relation
from entrograph.schemas.profile import CheckResult, CountProfile
from entrograph.services.coding_service import CodingService
from entrograph.services.entropy_service import EntropyService
from entrograph.services.growth_service import GrowthService
from entrograph.systems.catalog import (
    SYSTEMS,
    brouwer_sphere,
    circle_rotation,
    double_arrow_north_south,
    doubling_map,
    get_system,
    north_south_interval,
    translation_line_compactified,
)

logger = logging.getLogger(__name__)

FAMILY_DIR = Path(__file__).resolve().parent.parent / "families"

PARABOLIC_SYSTEMS = ["north-south-interval", "parabolic-disk", "translation-line", "double-arrow"]
PARABOLIC_HORIZON = 512
BROUWER_HORIZON = 256
BROUWER_DEGREE_BAND = (1.6, 2.4)
PROPERTY_HORIZON = 64
CODING_HORIZON = 256
SINGULARITY_N0 = 64
DOUBLING_HORIZON = 12
DOUBLING_TOLERANCE = 0.10

Check = Callable[[], CheckResult]


def load_family(name_or_path: Union[str, Path]) -> CodingFamily:
    """A family document by path, or by the name of a bundled one."""
    path = Path(name_or_path)
    if not path.exists():
        bundled = FAMILY_DIR / f"{name_or_path}.json"
        if not bundled.exists():
            known = ", ".join(sorted(p.stem for p in FAMILY_DIR.glob("*.json")))
            raise InvalidInputError(f"no family file '{name_or_path}' (bundled: {known})")
        path = bundled
    return CodingFamily.load(path)


def _class_check(
    name: str, profile: CountProfile, label: GrowthLabel, band: Optional[Tuple[float, float]] = None
) -> CheckResult:
    aggregate = profile.aggregate
    passed = aggregate is not None and aggregate.label == label
    if passed and band is not None:
        passed = band[0] <= aggregate.degree <= band[1]
    return CheckResult(
        name=name,
        passed=bool(passed),
        details={
            "status": profile.status.value,
            "aggregate": aggregate.model_dump(mode="json") if aggregate else None,
            "levels": {r.k: r.growth_class.label.value for r in profile.levels},
            "sandwich_ok": all(r.sandwich_ok is not False for r in profile.levels),
        },
    )


class VerifyService:
    """Desk-scale acceptance bundles, one CheckResult per claim."""

    # parabolic

    @staticmethod
    def linear_entropy(system_name: str, horizon: int = PARABOLIC_HORIZON) -> CheckResult:
        system = get_system(system_name)
        compact = system.default_compact(horizon)
        profile = EntropyService.entropy_profile(system, compact, system.default_levels, horizon)
        return _class_check(f"linear_entropy[{system_name}]", profile, GrowthLabel.LINEAR, settings.linear_band)

    # brouwer

    @staticmethod
    def brouwer_degree(horizon: int = BROUWER_HORIZON) -> CheckResult:
        system = brouwer_sphere()
        compact = system.default_compact(horizon)
        profile = EntropyService.entropy_profile(system, compact, system.default_levels, horizon)
        return _class_check("quadratic_entropy[brouwer-sphere]", profile, GrowthLabel.POLYNOMIAL, BROUWER_DEGREE_BAND)

    @staticmethod
    def brouwer_singularity() -> CheckResult:
        system = brouwer_sphere()
        result = CodingService.mutually_singular_probe(
            system, load_family("brouwer-corners"), SINGULARITY_N0, BROUWER_HORIZON
        )
        return CheckResult(
            name="mutual_singularity[brouwer-sphere]",
            passed=result.singular,
            details={"max_gap": result.max_gap, "witnesses": len(result.witnesses)},
        )

    @staticmethod
    def brouwer_coding_growth(horizon: int = BROUWER_HORIZON) -> CheckResult:
        system = brouwer_sphere()
        counts = CodingService.codings_count(system, load_family("brouwer-corners"), horizon)
        linear = GrowthSeries.from_function(float, horizon, label="n")
        verdict = GrowthService.compare(counts.series, linear)
        return CheckResult(
            name="superlinear_coding[brouwer-sphere]",
            passed=verdict.relation == Relation.GREATER,
            details={"verdict": verdict.model_dump(mode="json"), "c_N": counts.series.values[-1]},
        )

    @staticmethod
    def coding_bound(system_name: str, family_name: str) -> CheckResult:
        system = get_system(system_name)
        result = CodingService.coding_entropy_bound_check(
            system, load_family(family_name), system.default_levels, CODING_HORIZON
        )
        return result.model_copy(update={"name": f"coding_bound[{system_name}]"})

    # properties

    @staticmethod
    def sandwich_all(horizon: int = PROPERTY_HORIZON) -> CheckResult:
        failures = {}
        for name in SYSTEMS:
            system = get_system(name)
            compact = system.default_compact(horizon)
            family = system.entourages
            for k in system.default_levels:
                if family.square_root_level(k) > family.k_max:
                    continue
                result = EntropyService.sandwich_check(system, compact, k, horizon)
                if not result.ok:
                    failures[f"{name}:k={k}"] = result.violation_n
        return CheckResult(name="sandwich", passed=not failures, details={"violations": failures})

    @staticmethod
    def level_monotonicity() -> CheckResult:
        failures = {}
        for name in SYSTEMS:
            system = get_system(name)
            compact = system.default_compact(PROPERTY_HORIZON)
            levels = list(system.default_levels)
            series = {k: EntropyService.separated_count(system, compact, k, PROPERTY_HORIZON).array() for k in levels}
            for coarse, fine in zip(levels, levels[1:]):
                bad = np.flatnonzero(series[fine] < series[coarse])
                if bad.size:
                    failures[f"{name}:{coarse}->{fine}"] = int(bad[0]) + 1
        return CheckResult(name="level_monotonicity", passed=not failures, details={"violations": failures})

    @staticmethod
    def rotation_isometry() -> CheckResult:
        system = circle_rotation(Fraction(1, 4))
        compact = system.default_compact()
        moving = {}
        for k in system.default_levels:
            values = EntropyService.separated_count(system, compact, k, PROPERTY_HORIZON).array()
            if not np.all(values == values[0]):
                moving[k] = int(np.flatnonzero(values != values[0])[0]) + 1
        lyapunov = EntropyService.lyapunov_probe(system, compact, system.default_levels[0], PROPERTY_HORIZON)
        return CheckResult(
            name="zero_entropy[rotation]",
            passed=not moving and lyapunov.stable,
            details={"first_change": moving, "lyapunov_stable": lyapunov.stable, "witness": lyapunov.witness_level},
        )

    @staticmethod
    def doubling_rate() -> CheckResult:
        system = doubling_map()
        compact = system.compact("fine")
        rates = {
            k: GrowthService.project_exp(EntropyService.separated_count(system, compact, k, DOUBLING_HORIZON))
            for k in system.default_levels
        }
        target = float(np.log(2.0))
        passed = all(abs(rate - target) <= DOUBLING_TOLERANCE * target for rate in rates.values())
        return CheckResult(name="positive_entropy[doubling]", passed=passed, details={"rates": rates, "target": target})

    @staticmethod
    def power_monotonicity(horizon: int = PROPERTY_HORIZON) -> CheckResult:
        outcomes = {}
        for name in ["rotation", "north-south-interval", "translation-line"]:
            system = get_system(name)
            k = system.default_levels[len(system.default_levels) // 2]
            for r in (2, 3):
                outcomes[f"{name}^{r}"] = EntropyService.power_monotonicity_check(system, k, horizon, r).passed
        periodic = EntropyService.power_monotonicity_check(circle_rotation(Fraction(1, 4)), 4, horizon, 4)
        outcomes["rotation^4 bounded"] = periodic.details["power"]["label"] == GrowthLabel.BOUNDED.value
        return CheckResult(name="power_monotonicity", passed=all(outcomes.values()), details=outcomes)

    @staticmethod
    def parabolic_concentration(horizon: int = 2 * PROPERTY_HORIZON) -> CheckResult:
        system = translation_line_compactified()
        levels = system.default_levels
        near = EntropyService.restricted_profile(system, "ball-infinity", levels, horizon)
        away = EntropyService.restricted_profile(system, "middle", levels, horizon)
        near_label = near.aggregate.label if near.aggregate else None
        away_label = away.aggregate.label if away.aggregate else None
        return CheckResult(
            name="concentration[translation-line]",
            passed=near_label == GrowthLabel.LINEAR and away_label == GrowthLabel.BOUNDED,
            details={"ball-infinity": getattr(near_label, "value", None), "middle": getattr(away_label, "value", None)},
        )

    @staticmethod
    def semiconjugacy() -> CheckResult:
        return EntropyService.semiconjugacy_inequality_check(double_arrow_north_south(), PROPERTY_HORIZON)

    # coding

    @staticmethod
    def translation_line_coding() -> CheckResult:
        system = translation_line_compactified()
        counts = CodingService.codings_count(system, load_family("translation-line-interval"), CODING_HORIZON)
        growth = GrowthService.classify(counts.series)
        return CheckResult(
            name="linear_coding[translation-line]",
            passed=growth.label == GrowthLabel.LINEAR,
            details={"class": growth.model_dump(mode="json"), "exact": counts.exact},
        )

    @staticmethod
    def d_lower_identity() -> CheckResult:
        hitting = HittingData(source="a", target="b", bound=CODING_HORIZON, hits=list(range(1, CODING_HORIZON + 1)))
        d = CodingService.d_lower_bound(hitting, CODING_HORIZON).values
        expected = [n * (n - 1) / 2 for n in range(1, CODING_HORIZON + 1)]
        mismatch = [n for n, (a, b) in enumerate(zip(d, expected), start=1) if a != b]
        return CheckResult(name="d_lower_identity", passed=not mismatch, details={"first_mismatch": mismatch[:1]})

    @staticmethod
    def north_south_not_singular() -> CheckResult:
        system = north_south_interval()
        result = CodingService.mutually_singular_probe(system, load_family("north-south-pair"), SINGULARITY_N0, CODING_HORIZON)
        bounded = result.certified_bound is not None and (result.max_gap is None or result.max_gap <= result.certified_bound)
        return CheckResult(
            name="not_singular[north-south-interval]",
            passed=not result.singular and bounded,
            details={"max_gap": result.max_gap, "certified_bound": result.certified_bound},
        )

    @staticmethod
    def coding_properties() -> CheckResult:
        system = translation_line_compactified()
        pair = CodingFamily.from_document(
            {"members": [{"label": "a", "shape": {"interval": ["0", "1/2"]}}, {"label": "b", "shape": {"interval": ["2", "5/2"]}}]}
        )
        smaller = CodingFamily.from_document({"members": [{"label": "a", "shape": {"interval": ["0", "1/4"]}}]})
        larger = load_family("translation-line-interval")
        additivity = CodingService.additivity_check(system, pair, CODING_HORIZON)
        monotone = CodingService.monotonicity_check(system, smaller, larger, CODING_HORIZON)
        return CheckResult(
            name="coding_properties[translation-line]",
            passed=additivity.passed and monotone.passed,
            details={"additivity": additivity.passed, "monotonicity": monotone.passed},
        )

    # suites

    @classmethod
    def suites(cls) -> Dict[str, List[Check]]:
        parabolic = [lambda name=name: cls.linear_entropy(name) for name in PARABOLIC_SYSTEMS]
        brouwer = [
            cls.brouwer_degree,
            cls.brouwer_singularity,
            cls.brouwer_coding_growth,
            lambda: cls.coding_bound("brouwer-sphere", "brouwer-corners"),
        ]
        properties = [
            cls.sandwich_all,
            cls.level_monotonicity,
            cls.rotation_isometry,
            cls.doubling_rate,
            cls.power_monotonicity,
            cls.parabolic_concentration,
            cls.semiconjugacy,
        ]
        coding = [
            cls.translation_line_coding,
            lambda: cls.coding_bound("translation-line", "translation-line-interval"),
            cls.d_lower_identity,
            cls.north_south_not_singular,
            cls.coding_properties,
        ]
        double_arrow = [lambda: cls.linear_entropy("double-arrow"), cls.semiconjugacy]
        return {
            "parabolic": parabolic,
            "brouwer": brouwer,
            "properties": properties,
            "coding": coding,
            "double-arrow": double_arrow,
            "all": parabolic + brouwer + properties + coding,
        }

    @classmethod
    def run(cls, suite: str) -> List[CheckResult]:
        suites = cls.suites()
        if suite not in suites:
            raise InvalidInputError(f"unknown suite '{suite}' (known: {', '.join(suites)})")

        logger.info("=" * 80)
        logger.info(f"🚀 VERIFY SUITE: {suite}")
        logger.info("=" * 80)
        results = []
        for check in suites[suite]:
            started = time.perf_counter()
            try:
                result = check()
            except EntrographError as e:
                # one failing check does not stop the suite
                logger.error(f"❌ check raised: {e.message}")
                result = CheckResult(name=getattr(check, "__name__", "check"), passed=False, details={"error": e.message})
            elapsed = round(time.perf_counter() - started, 1)
            logger.info(f"{'✅' if result.passed else '❌'} {result.name} ({elapsed}s)")
            results.append(result)

        passed = sum(r.passed for r in results)
        logger.info("=" * 80)
        logger.info(f"📊 {suite}: {passed}/{len(results)} checks passed")
        logger.info("=" * 80)
        return results
