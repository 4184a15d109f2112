"""The double arrow over g(x) = x^2, and its projection to the interval.

Points are (x, side) with the lexicographic order topology. x stays an exact
rational while its denominator fits in `double_arrow_exact_bits`; after that
it is carried as lam = -ln x, where squaring is the exact doubling of lam.
Neither representation ever rounds a point onto a cut: cuts are dyadic and
log-mode points are far past every dyadic denominator.
"""
import logging
import math
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from entrograph.core.config import settings
from entrograph.core.errors import InvalidInputError
from entrograph.schemas.growth import GrowthClass, GrowthLabel
from entrograph.systems.base import DynamicalSystem, concat_states
from entrograph.uniformity.base import SampledCompact
from entrograph.uniformity.metric import MetricFamily, euclidean_distance, metric_family
from entrograph.uniformity.partition import PartitionFamily, dyadic_cuts, partition_family

logger = logging.getLogger(__name__)


class ArrowPoint(NamedTuple):
    x: Optional[Fraction]
    lam: Optional[float]
    side: int = 0

    @classmethod
    def exact(cls, x: Any, side: int = 0) -> "ArrowPoint":
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise InvalidInputError(f"double arrow coordinate {x} outside [0, 1]")
        return cls(x=x, lam=None, side=int(side))

    def as_floats(self) -> Tuple[float, float]:
        """(x, 1 - x) in floating point, both to full relative precision."""
        if self.x is not None:
            return float(self.x), float(1 - self.x)
        return math.exp(-self.lam), -math.expm1(-self.lam)

    def order_key(self) -> Tuple[Any, int]:
        return (self.x if self.x is not None else Fraction(self.as_floats()[0]), self.side)


def neg_log(x: Fraction) -> float:
    if x == 0:
        return math.inf
    if x > Fraction(1, 2):
        return -math.log1p(-float(1 - x))
    return math.log(x.denominator) - math.log(x.numerator)


def square_point(p: ArrowPoint, exact_bits: int) -> ArrowPoint:
    if p.x is None:
        return ArrowPoint(None, 2.0 * p.lam, p.side)
    squared = p.x * p.x
    if squared.denominator.bit_length() > exact_bits:
        return ArrowPoint(None, 2.0 * neg_log(p.x), p.side)
    return ArrowPoint(squared, None, p.side)


def sqrt_point(p: ArrowPoint) -> ArrowPoint:
    if p.x is None:
        return ArrowPoint(None, 0.5 * p.lam, p.side)
    num, den = math.isqrt(p.x.numerator), math.isqrt(p.x.denominator)
    if num * num == p.x.numerator and den * den == p.x.denominator:
        return ArrowPoint(Fraction(num, den), None, p.side)
    return ArrowPoint(None, 0.5 * neg_log(p.x), p.side)


def point_array(points: Iterable[ArrowPoint]) -> np.ndarray:
    points = list(points)
    out = np.empty(len(points), dtype=object)
    out[:] = points
    return out


def dyadic_grid(level: int, sides: Iterable[int]) -> List[ArrowPoint]:
    """Dyadic points of the given level, without the isolated ends (0, 0) and (1, 1)."""
    points = []
    for m in range(2**level + 1):
        x = Fraction(m, 2**level)
        for side in sides:
            if (x == 0 and side == 0) or (x == 1 and side == 1):
                continue
            points.append(ArrowPoint(x, None, side))
    return points


def repeller_ladder(horizon: int) -> List[ArrowPoint]:
    """Points 1 - r with log2(1/r) spread evenly up to the horizon; their escape times cover it."""
    density = settings.ladder_density
    points = []
    for j in range(1, horizon + 9):
        for i in range(density):
            r = Fraction(density + i, density * 2**j)
            if r < 1:
                points.append(ArrowPoint(1 - r, None, 0))
    return points


class SquaringMap(DynamicalSystem):
    """Shared stepping of x -> x^2 on ArrowPoint batches."""

    shape_kinds = ("interval",)
    expected_class = GrowthClass(label=GrowthLabel.LINEAR, degree=1.0)

    def __init__(self, grid_level: Optional[int] = None, exact_bits: Optional[int] = None):
        self.grid_level = grid_level or settings.double_arrow_grid_level
        self.exact_bits = exact_bits or settings.double_arrow_exact_bits
        super().__init__()

    def state_batch(self, states: List[Any]) -> np.ndarray:
        return point_array(states)

    def step(self, states: Any) -> np.ndarray:
        return point_array(square_point(p, self.exact_bits) for p in states)

    def step_inv(self, states: Any) -> np.ndarray:
        return point_array(sqrt_point(p) for p in states)

    def coordinates(self, states: Any) -> np.ndarray:
        return np.array([[p.as_floats()[0], p.side] for p in states], dtype=float).reshape(-1, 2)

    def from_coordinates(self, coords: Any) -> np.ndarray:
        """Entries are x values (side 0) or (x, side) pairs."""
        points = []
        for entry in coords:
            if isinstance(entry, (tuple, list, np.ndarray)):
                points.append(ArrowPoint.exact(entry[0], int(entry[1])))
            else:
                points.append(ArrowPoint.exact(entry))
        return point_array(points)


class DoubleArrow(SquaringMap):
    name = "double-arrow"

    def build_entourages(self) -> PartitionFamily:
        """Dyadic cuts only, up to the grid level.

        Ladder points are not cuts, so ladder points within 2^-grid_level of 1
        share the top cell until squaring pulls them apart. Adding them would put
        cuts a relative r/2 away from squared ladder points 1 - r, below what the
        log-mode representation resolves.
        """
        return partition_family(dyadic_cuts, k_min=1, k_max=self.grid_level)

    def features(self, states: Any) -> np.ndarray:
        family: PartitionFamily = self.entourages
        cells = np.empty(len(states), dtype=np.int64)
        for i, p in enumerate(states):
            if p.x is not None:
                cells[i] = family.cell_index(p.x, p.side)
            else:
                cells[i] = family.cell_index_float(*p.as_floats())
        return cells

    def non_wandering_states(self) -> np.ndarray:
        return point_array([ArrowPoint(Fraction(0), None, 1), ArrowPoint(Fraction(1), None, 0)])

    def compact_builders(self) -> Dict[str, Callable[[int], SampledCompact]]:
        return {
            "default": self._default,
            "grid": lambda horizon: self.make_compact("grid", point_array(dyadic_grid(self.grid_level, (0, 1))), self.grid_level),
            "ladder": lambda horizon: self.make_compact("ladder", point_array(repeller_ladder(horizon)), 0),
        }

    def _default(self, horizon: int) -> SampledCompact:
        grid = point_array(dyadic_grid(self.grid_level, (0, 1)))
        ladder = point_array(repeller_ladder(horizon))
        return self.make_compact(
            "default",
            concat_states([grid, ladder]),
            self.grid_level,
            pieces={"grid": np.arange(len(grid)), "ladder": np.arange(len(grid), len(grid) + len(ladder))},
        )


class IntervalSquare(SquaringMap):
    """x -> x^2 on [0, 1] with the Euclidean metric; the quotient of the double arrow."""

    name = "interval-square"

    def build_entourages(self) -> MetricFamily:
        return metric_family(euclidean_distance, eps0=0.5, k_min=0, k_max=12)

    def features(self, states: Any) -> np.ndarray:
        return np.array([p.as_floats()[0] for p in states], dtype=float).reshape(-1, 1)

    def non_wandering_states(self) -> np.ndarray:
        return point_array([ArrowPoint(Fraction(0), None, 0), ArrowPoint(Fraction(1), None, 0)])

    def compact_builders(self) -> Dict[str, Callable[[int], SampledCompact]]:
        return {
            "default": lambda horizon: self.make_compact(
                "default", point_array(dyadic_grid(self.grid_level, (0,)) + repeller_ladder(horizon)), self.grid_level - 1
            ),
        }


Projection = Callable[[Any], np.ndarray]


def semiconjugacy_projection(system: DoubleArrow) -> Tuple[Projection, IntervalSquare]:
    """Forget the side: returns pi and the interval system it intertwines with."""
    if not isinstance(system, DoubleArrow):
        raise InvalidInputError(f"projection is defined for the double arrow, not '{system.name}'")
    target = IntervalSquare(grid_level=system.grid_level, exact_bits=system.exact_bits)

    def project(states: Any) -> np.ndarray:
        return point_array(ArrowPoint(p.x, p.lam, 0) for p in states)

    return project, target


def project_compact(project: Projection, target: IntervalSquare, compact: SampledCompact) -> SampledCompact:
    return target.make_compact(f"pi({compact.label})", project(compact.states), 0, pieces=dict(compact.pieces))
