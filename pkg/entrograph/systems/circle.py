"""Circle maps on R/Z in 48-bit fixed point.

States are integer numerators over 2^48. Rotation adds a fixed numerator and
doubling shifts left, both exactly; converting to float for the arc metric
is exact as well, so isometry and periodicity hold bit for bit.
"""
from fractions import Fraction
from typing import Any, Callable, Dict, Union

import numpy as np

from entrograph.core.errors import InvalidInputError
from entrograph.schemas.growth import GrowthClass, GrowthLabel
from entrograph.systems.base import DynamicalSystem
from entrograph.uniformity.base import SampledCompact
from entrograph.uniformity.metric import MetricFamily, arc_distance, metric_family

CIRCLE_BITS = 48
UNIT = 1 << CIRCLE_BITS


def _to_fixed(x: Any) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1) % 1.0
    return np.round(x * UNIT).astype(np.int64) % UNIT


class CircleMap(DynamicalSystem):
    shape_kinds = ("arc",)

    def build_entourages(self) -> MetricFamily:
        return metric_family(arc_distance, eps0=0.5, k_min=0, k_max=16)

    def features(self, states: Any) -> np.ndarray:
        return (np.asarray(states, dtype=np.int64).astype(float) / UNIT)[:, None]

    def coordinates(self, states: Any) -> np.ndarray:
        return self.features(states)

    def from_coordinates(self, coords: Any) -> np.ndarray:
        return _to_fixed(coords)

    def grid(self, label: str, points: int, density_level: int) -> SampledCompact:
        return self.make_compact(label, _to_fixed(np.arange(points) / points), density_level)


class CircleRotation(CircleMap):
    name = "rotation"
    non_wandering_everything = True
    expected_class = GrowthClass(label=GrowthLabel.BOUNDED, degree=0.0)
    default_levels = (4, 5, 6, 7, 8)

    def __init__(self, alpha: Union[float, str, Fraction] = Fraction(1, 4)):
        alpha = Fraction(alpha)
        if not 0 <= alpha < 1:
            raise InvalidInputError(f"rotation angle must lie in [0, 1), got {alpha}")
        self.alpha = alpha
        self.shift = round(alpha * UNIT) % UNIT
        super().__init__()

    def step(self, states: Any) -> np.ndarray:
        return (np.asarray(states, dtype=np.int64) + self.shift) % UNIT

    def step_inv(self, states: Any) -> np.ndarray:
        return (np.asarray(states, dtype=np.int64) - self.shift) % UNIT

    def non_wandering_states(self) -> np.ndarray:
        return np.empty(0, dtype=np.int64)

    def compact_builders(self) -> Dict[str, Callable[[int], SampledCompact]]:
        return {
            "default": lambda horizon: self.grid("default", 4096, 11),
            "coarse": lambda horizon: self.grid("coarse", 256, 7),
        }


class DoublingMap(CircleMap):
    name = "doubling"
    invertible = False
    expected_class = GrowthClass(label=GrowthLabel.EXPONENTIAL, rate=float(np.log(2.0)))
    default_levels = (2, 3)

    def step(self, states: Any) -> np.ndarray:
        return (np.asarray(states, dtype=np.int64) * 2) % UNIT

    def non_wandering_states(self) -> np.ndarray:
        return np.zeros(1, dtype=np.int64)

    def compact_builders(self) -> Dict[str, Callable[[int], SampledCompact]]:
        # non-dyadic grids so orbits do not collapse onto 0
        return {
            "default": lambda horizon: self.grid("default", 10_000, 12),
            "fine": lambda horizon: self.grid("fine", 100_000, 15),
        }
