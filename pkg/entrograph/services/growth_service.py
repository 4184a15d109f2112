import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from entrograph.core.config import settings
from entrograph.core.errors import HorizonMismatchError, InvalidInputError
from entrograph.schemas.growth import (
    ComparisonVerdict,
    GrowthClass,
    GrowthLabel,
    GrowthSeries,
    Relation,
    term_ratio,
)

logger = logging.getLogger(__name__)

# A ratio whose second-half maximum exceeds the first-half maximum by more
# than this factor is growing across the tail.
RATIO_GROWTH_TOLERANCE = 0.05


class GrowthBands:
    def __init__(
        self,
        tail_fraction: Optional[float] = None,
        linear_band: Optional[Tuple[float, float]] = None,
        bounded_band_high: Optional[float] = None,
        exponential_threshold: Optional[float] = None,
    ):
        self.tail_fraction = tail_fraction if tail_fraction is not None else settings.tail_fraction
        self.linear_band = tuple(linear_band if linear_band is not None else settings.linear_band)
        self.bounded_band_high = (
            bounded_band_high if bounded_band_high is not None else settings.bounded_band_high
        )
        self.exponential_threshold = (
            exponential_threshold if exponential_threshold is not None else settings.exponential_threshold
        )
        if not 0 < self.tail_fraction <= 1:
            raise InvalidInputError(f"tail_fraction {self.tail_fraction} outside (0, 1]")


class GrowthService:
    """Orders of growth over a finite horizon: comparison, sups, projections, classes."""

    @staticmethod
    def _check_horizons(series: List[GrowthSeries]) -> int:
        horizons = {s.horizon for s in series}
        if len(horizons) != 1:
            raise HorizonMismatchError(f"horizon mismatch: {sorted(horizons)}")
        return horizons.pop()

    @staticmethod
    def _dominates(a: np.ndarray, b: np.ndarray, tail_start: int) -> Tuple[bool, float]:
        ratio = term_ratio(a, b)
        tail = ratio[tail_start - 1 :]
        half = max(len(tail) // 2, 1)
        first, second = tail[:half].max(), tail[half:].max() if len(tail) > half else tail[:half].max()
        if not np.isfinite(first) or not np.isfinite(second):
            return False, math.inf
        holds = second <= first * (1.0 + RATIO_GROWTH_TOLERANCE) or second <= first + 1e-12
        return bool(holds), float(ratio[np.isfinite(ratio)].max())

    @classmethod
    def compare(cls, a: GrowthSeries, b: GrowthSeries, tail_start: Optional[int] = None) -> ComparisonVerdict:
        """Decide [a] vs [b] by checking that each ratio stops growing over the tail."""
        horizon = cls._check_horizons([a, b])
        if tail_start is None:
            tail_start = max(1, horizon // 4)
        if not 1 <= tail_start <= horizon // 2:
            raise InvalidInputError(f"tail_start {tail_start} outside [1, {horizon // 2}]")

        a_le_b, c_ab = cls._dominates(a.array(), b.array(), tail_start)
        b_le_a, c_ba = cls._dominates(b.array(), a.array(), tail_start)

        if a_le_b and b_le_a:
            relation = Relation.EQUIVALENT
        elif a_le_b:
            relation = Relation.LESS
        elif b_le_a:
            relation = Relation.GREATER
        else:
            relation = Relation.INCOMPARABLE

        return ComparisonVerdict(
            relation=relation,
            witness_constant=c_ab if a_le_b else None,
            reverse_constant=c_ba if b_le_a else None,
        )

    @classmethod
    def sup(cls, series_list: List[GrowthSeries]) -> GrowthSeries:
        if not series_list:
            raise InvalidInputError("sup of an empty list")
        cls._check_horizons(series_list)
        if all(s.log_values is not None for s in series_list):
            logs = np.max([np.asarray(s.log_values) for s in series_list], axis=0)
            return GrowthSeries.from_log_values(logs.tolist(), label="sup")
        values = np.max([s.array() for s in series_list], axis=0)
        return GrowthSeries.from_values(values.tolist(), label="sup")

    @staticmethod
    def _tail(a: GrowthSeries, tail_fraction: float) -> Tuple[np.ndarray, np.ndarray]:
        horizon = a.horizon
        size = int(math.floor(tail_fraction * horizon))
        if size < 3:
            raise InvalidInputError(f"degenerate tail: {size} points (need 3)")
        n = np.arange(horizon - size + 1, horizon + 1, dtype=float)
        logs = a.log_array()[horizon - size :]
        if not np.all(np.isfinite(logs)):
            raise InvalidInputError("series overflows a float on the tail; build it from log values")
        return n, logs

    @staticmethod
    def _slope(x: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
        if np.ptp(y) == 0:
            return 0.0, 0.0
        slope, intercept = np.polyfit(x, y, 1)
        residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
        return float(slope), residual

    @classmethod
    def project_poly(cls, a: GrowthSeries, tail_fraction: Optional[float] = None) -> float:
        """Least-squares slope of log a(n) against log n over the tail."""
        if a.log_values is None and math.isinf(a.values[-1]):
            return math.inf
        n, logs = cls._tail(a, tail_fraction or settings.tail_fraction)
        slope, _ = cls._slope(np.log(n), logs)
        return max(slope, 0.0)

    @classmethod
    def project_exp(cls, a: GrowthSeries, tail_fraction: Optional[float] = None) -> float:
        """Least-squares slope of log a(n) against n over the tail."""
        n, logs = cls._tail(a, tail_fraction or settings.tail_fraction)
        slope, _ = cls._slope(n, logs)
        return max(slope, 0.0)

    @classmethod
    def classify(cls, a: GrowthSeries, bands: Optional[GrowthBands] = None) -> GrowthClass:
        bands = bands or GrowthBands()
        if a.horizon < 16:
            raise InvalidInputError(f"classification needs horizon >= 16, got {a.horizon}")

        n, logs = cls._tail(a, bands.tail_fraction)
        degree, poly_residual = cls._slope(np.log(n), logs)
        rate, exp_residual = cls._slope(n, logs)
        degree, rate = max(degree, 0.0), max(rate, 0.0)

        if rate > bands.exponential_threshold and exp_residual < poly_residual:
            return GrowthClass(label=GrowthLabel.EXPONENTIAL, degree=degree, rate=rate, fit_residual=exp_residual)

        tail_values = a.array()[a.horizon - len(n) :]
        settled = tail_values[len(tail_values) // 2 :]
        eventually_constant = bool(np.all(settled == settled[0]))

        low, high = bands.linear_band
        if degree <= bands.bounded_band_high and eventually_constant:
            label = GrowthLabel.BOUNDED
            degree = 0.0
        elif low <= degree <= high:
            label = GrowthLabel.LINEAR
        else:
            label = GrowthLabel.POLYNOMIAL
        return GrowthClass(label=label, degree=degree, rate=rate, fit_residual=poly_residual)

    @classmethod
    def is_linearly_invariant(cls, a: GrowthSeries, m: int) -> Tuple[bool, ComparisonVerdict]:
        """Test [a(n)] = [a(mn)] on the sub-horizon where a(mn) is known."""
        if m < 2:
            raise InvalidInputError(f"m must be >= 2, got {m}")
        sub_horizon = a.horizon // m
        if sub_horizon < 8:
            raise InvalidInputError(f"horizon {a.horizon} too short for m={m} (need {8 * m})")

        head = a.truncated(sub_horizon)
        if a.log_values is not None:
            stretched = GrowthSeries.from_log_values([a.log_values[m * n - 1] for n in range(1, sub_horizon + 1)])
        else:
            stretched = GrowthSeries.from_values([a.values[m * n - 1] for n in range(1, sub_horizon + 1)])

        verdict = cls.compare(head, stretched)
        logger.debug(f"linear invariance m={m}: {verdict.relation.value}")
        return verdict.relation == Relation.EQUIVALENT, verdict
