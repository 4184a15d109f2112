"""North-south dynamics on [0, 1] by the Mobius map x -> x / (2 - x).

States are base-2 log-odds L = log2(x / (1 - x)). The map is L -> L - 1 in
these coordinates, so forward and backward steps are exact and points
arbitrarily close to the repeller 1 stay distinguishable.
"""
import math
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from entrograph.core.config import settings
from entrograph.schemas.growth import GrowthClass, GrowthLabel
from entrograph.systems.base import DynamicalSystem, ExactIntervalMap, concat_states
from entrograph.uniformity.base import SampledCompact
from entrograph.uniformity.metric import MetricFamily, euclidean_distance, metric_family

GRID_POINTS = 2**12 + 1
GRID_DENSITY_LEVEL = 10


def log_odds(x: Any) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log2(x) - np.log2(1.0 - x)


def from_log_odds(L: Any) -> np.ndarray:
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp2(-np.asarray(L, dtype=float)))


class NorthSouthInterval(DynamicalSystem, ExactIntervalMap):
    name = "north-south-interval"
    shape_kinds = ("interval",)
    expected_class = GrowthClass(label=GrowthLabel.LINEAR, degree=1.0)
    default_levels = (4, 5, 6, 7, 8, 9)
    conjugacy_shift = -1.0

    def build_entourages(self) -> MetricFamily:
        return metric_family(euclidean_distance, eps0=0.5, k_min=0, k_max=16)

    def step(self, states: Any) -> np.ndarray:
        return np.asarray(states, dtype=float) - 1.0

    def step_inv(self, states: Any) -> np.ndarray:
        return np.asarray(states, dtype=float) + 1.0

    def features(self, states: Any) -> np.ndarray:
        return from_log_odds(states)[:, None]

    def coordinates(self, states: Any) -> np.ndarray:
        return self.features(states)

    def from_coordinates(self, coords: Any) -> np.ndarray:
        return log_odds(np.asarray(coords, dtype=float).reshape(-1))

    def non_wandering_states(self) -> np.ndarray:
        return np.array([-np.inf, np.inf])

    def compact_builders(self) -> Dict[str, Callable[[int], SampledCompact]]:
        return {
            "default": self._default,
            "grid": lambda horizon: self.make_compact("grid", self.from_coordinates(np.linspace(0.0, 1.0, GRID_POINTS)), GRID_DENSITY_LEVEL),
            "core": lambda horizon: self.make_compact("core", self.from_coordinates(np.linspace(0.1, 0.9, GRID_POINTS)), GRID_DENSITY_LEVEL),
            "ladder": lambda horizon: self.make_compact("ladder", self._ladder(horizon), 0),
        }

    def _ladder(self, horizon: int) -> np.ndarray:
        # log-odds in [0, horizon + 8]: escape times from near 1 cover the horizon
        density = settings.ladder_density
        return np.arange(0, (horizon + 8) * density + 1) / density

    def _default(self, horizon: int) -> SampledCompact:
        grid = self.from_coordinates(np.linspace(0.0, 1.0, GRID_POINTS))
        ladder = self._ladder(horizon)
        return self.make_compact(
            "default",
            concat_states([grid, ladder]),
            GRID_DENSITY_LEVEL,
            pieces={"grid": np.arange(len(grid)), "ladder": np.arange(len(grid), len(grid) + len(ladder))},
        )

    # exact rational path

    def exact_step(self, x: Optional[Fraction]) -> Optional[Fraction]:
        return x / (2 - x)

    def exact_step_inv(self, x: Optional[Fraction]) -> Optional[Fraction]:
        return 2 * x / (1 + x)

    def exact_domain_points(self, breakpoints: List[Fraction]) -> List[Optional[Fraction]]:
        points: List[Optional[Fraction]] = [Fraction(0), Fraction(1)]
        inner = [b for b in breakpoints if 0 < b < 1]
        if inner:
            points += [min(inner) / 2, (max(inner) + 1) / 2]
        else:
            points.append(Fraction(1, 2))
        return points

    def conjugacy(self, x: Fraction) -> float:
        if x <= 0:
            return -math.inf
        if x >= 1:
            return math.inf
        return math.log2(x.numerator) - math.log2(x.denominator - x.numerator)
