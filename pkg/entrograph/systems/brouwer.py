"""Brouwer homeomorphism of the sphere with a single fixed point at infinity.

Above the strip 0 < y < 1 points translate right, below it left. Inside the
strip every point lies on exactly one curve x = 1 / (y (y - 1)) + c and moves
down that curve by arc length 1. States are rows (x, y); infinity is the
row (inf, inf).
"""
import logging
from typing import Any, Callable, Dict

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from entrograph.core.errors import IntegrationError
from entrograph.schemas.growth import GrowthClass, GrowthLabel
from entrograph.systems.base import DynamicalSystem, concat_states
from entrograph.uniformity.base import SampledCompact
from entrograph.uniformity.metric import MetricFamily, euclidean_distance, metric_family

logger = logging.getLogger(__name__)

INTEGRATION_TOLERANCE = 1e-8
NEWTON_ITERATIONS = 3
GAUSS_NODES, GAUSS_WEIGHTS = leggauss(32)

SQUARE_STEP = 1.0 / 16
# above this horizon the ladder thins out to keep about this many rungs per axis
STRIP_REFERENCE_HORIZON = 256
# ladder orbits cross x = STRIP_CROSSING at heights >= 3/4 going right, <= 1/4 going left
STRIP_CROSSING = 1.0 / 8
STRIP_MIN_LEVEL = 16.0 / 3 + STRIP_CROSSING


def curve_slope(y: np.ndarray) -> np.ndarray:
    """dx/dy along the curve through (x, y)."""
    return -(2.0 * y - 1.0) / (y * (y - 1.0)) ** 2


def curve_speed(y: np.ndarray) -> np.ndarray:
    g = curve_slope(y)
    return np.sqrt(1.0 + g * g)


def arc_length(y_start: np.ndarray, y_end: np.ndarray) -> np.ndarray:
    """Arc length of the curves between heights, by Gauss-Legendre quadrature in y."""
    mid = 0.5 * (y_start + y_end)
    half = 0.5 * (y_start - y_end)
    nodes = mid[:, None] + half[:, None] * GAUSS_NODES[None, :]
    return np.abs(half * (curve_speed(nodes) @ GAUSS_WEIGHTS))


def strip_top_height(span: np.ndarray) -> np.ndarray:
    """Upper height where the curve with c - x = span passes x."""
    return 0.5 * (1.0 + np.sqrt(1.0 - 4.0 / span))


def crossing_arc(level: float) -> float:
    """Arc length of the curve x = 1 / (y (y - 1)) + level between its two passages of x = STRIP_CROSSING."""
    top = float(strip_top_height(np.float64(level - STRIP_CROSSING)))
    half, _ = quad(lambda y: float(curve_speed(np.float64(y))), 0.5, top, limit=200, epsabs=1e-11)
    return 2.0 * half


def crossing_level(arc: float) -> float:
    """The curve level whose two crossings are `arc` apart."""
    return brentq(lambda c: crossing_arc(c) - arc, STRIP_MIN_LEVEL, STRIP_MIN_LEVEL + arc, xtol=1e-12)


def stereographic(states: np.ndarray) -> np.ndarray:
    states = np.asarray(states, dtype=float).reshape(-1, 2)
    finite = np.isfinite(states).all(axis=1)
    x = np.where(finite, states[:, 0], 0.0)
    y = np.where(finite, states[:, 1], 0.0)
    r2 = x * x + y * y
    out = np.stack([2.0 * x, 2.0 * y, r2 - 1.0], axis=1) / (r2 + 1.0)[:, None]
    out[~finite] = (0.0, 0.0, 1.0)
    return out


class BrouwerSphere(DynamicalSystem):
    name = "brouwer-sphere"
    shape_kinds = ("rect",)
    expected_class = GrowthClass(label=GrowthLabel.POLYNOMIAL, degree=2.0)
    default_levels = (3, 4, 5, 6, 7)
    # strip ladders by horizon, shared by every instance
    _ladders: Dict[int, np.ndarray] = {}

    def build_entourages(self) -> MetricFamily:
        return metric_family(euclidean_distance, eps0=1.0, k_min=0, k_max=16)

    def step(self, states: Any) -> np.ndarray:
        return self._move(states, direction=-1.0)

    def step_inv(self, states: Any) -> np.ndarray:
        return self._move(states, direction=1.0)

    def _move(self, states: Any, direction: float) -> np.ndarray:
        states = np.asarray(states, dtype=float).reshape(-1, 2)
        out = states.copy()
        finite = np.isfinite(states).all(axis=1)
        y = states[:, 1]
        upper = finite & (y >= 1.0)
        lower = finite & (y <= 0.0)
        strip = finite & ~upper & ~lower
        # forward: top moves right, bottom moves left
        out[upper, 0] -= direction
        out[lower, 0] += direction
        if strip.any():
            out[strip] = self._strip_step(states[strip], direction)
        return out

    def _strip_step(self, points: np.ndarray, direction: float) -> np.ndarray:
        x0, y0 = points[:, 0], points[:, 1]

        def height_rate(s: float, z: np.ndarray) -> np.ndarray:
            return direction / curve_speed(y0 + z)

        solution = solve_ivp(
            height_rate,
            (0.0, 1.0),
            np.zeros_like(y0),
            method="RK45",
            rtol=INTEGRATION_TOLERANCE,
            atol=INTEGRATION_TOLERANCE,
        )
        if not solution.success:
            raise IntegrationError(f"arc-length integration failed: {solution.message}")
        y1 = y0 + solution.y[:, -1]

        for _ in range(NEWTON_ITERATIONS):
            residual = arc_length(y0, y1) - 1.0
            y1 = y1 - direction * residual / curve_speed(y1)

        escaped = ~((y1 > 0.0) & (y1 < 1.0)) | ~np.isfinite(y1)
        if escaped.any():
            bad = int(np.flatnonzero(escaped)[0])
            raise IntegrationError(
                f"strip step left the strip from ({x0[bad]:.17g}, {y0[bad]:.17g}) to height {y1[bad]:.17g}"
            )

        residual = np.abs(arc_length(y0, y1) - 1.0)
        if residual.max() > 1e-6:
            logger.warning(f"arc-length residual {residual.max():.3e} after polishing")

        x1 = x0 + (y0 - y1) * (y0 + y1 - 1.0) / (y0 * y1 * (y0 - 1.0) * (y1 - 1.0))
        return np.stack([x1, y1], axis=1)

    def features(self, states: Any) -> np.ndarray:
        return stereographic(states)

    def coordinates(self, states: Any) -> np.ndarray:
        return np.asarray(states, dtype=float).reshape(-1, 2)

    def from_coordinates(self, coords: Any) -> np.ndarray:
        states = np.array(coords, dtype=float).reshape(-1, 2)
        states[~np.isfinite(states).all(axis=1)] = np.inf
        return states

    def non_wandering_states(self) -> np.ndarray:
        return np.array([[np.inf, np.inf]])

    def compact_builders(self) -> Dict[str, Callable[[int], SampledCompact]]:
        return {
            "default": self._default,
            "square": lambda horizon: self.make_compact("square", self._square(), 4),
            "strip": lambda horizon: self.make_compact("strip", self._strip_ladder(horizon), 0),
            "top-left": lambda horizon: self.make_compact("top-left", self._top_left(), 0),
            "top-edge": lambda horizon: self.make_compact("top-edge", self._top_edge(), 0),
        }

    def _square(self) -> np.ndarray:
        axis = np.arange(0.0, 1.0 + SQUARE_STEP / 2, SQUARE_STEP)
        return np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)

    def _strip_ladder(self, horizon: int) -> np.ndarray:
        """Strip points crossing x = 1/8 near the top at time t and near the bottom at time t + j.

        Rungs run over every pair t >= 0, j >= j_min with t + j <= horizon
        (every stride-th value above STRIP_REFERENCE_HORIZON). Each rung is a
        crossing point pulled back t steps, so both passage times are exact.
        """
        if horizon in self._ladders:
            return self._ladders[horizon]
        stride = max(1, -(-horizon // STRIP_REFERENCE_HORIZON))
        first = int(np.floor(crossing_arc(STRIP_MIN_LEVEL))) + 1
        arcs = np.arange(first, horizon + 1, stride)
        levels = np.array([crossing_level(float(j)) for j in arcs])
        current = np.stack([np.full(len(levels), STRIP_CROSSING), strip_top_height(levels - STRIP_CROSSING)], axis=1)

        rungs, t = [], 0
        while len(arcs):
            rungs.append(current)
            t += stride
            alive = arcs + t <= horizon
            arcs, current = arcs[alive], current[alive]
            for _ in range(stride):
                if len(current):
                    current = self.step_inv(current)
        ladder = np.concatenate(rungs) if rungs else np.empty((0, 2))
        logger.debug(f"brouwer strip ladder: {len(ladder)} rungs for horizon {horizon}")
        self._ladders[horizon] = ladder
        return ladder

    def _top_left(self) -> np.ndarray:
        xs = np.arange(0.0, 0.25 + 1e-12, 1.0 / 64)
        heights = 1.0 - 2.0 ** -np.linspace(2.0, 10.0, 64)
        x, y = np.meshgrid(xs, heights, indexing="ij")
        return np.stack([x.ravel(), y.ravel()], axis=1)

    def _top_edge(self) -> np.ndarray:
        xs = np.arange(0.0, 1.0 + 1e-12, 1.0 / 16)
        heights = np.concatenate([[1.0], 1.0 - 2.0 ** -np.linspace(1.0, 12.0, 48)])
        x, y = np.meshgrid(xs, heights, indexing="ij")
        return np.stack([x.ravel(), y.ravel()], axis=1)

    def _default(self, horizon: int) -> SampledCompact:
        parts = [self._square(), self._strip_ladder(horizon), self.non_wandering_states()]
        sizes = np.cumsum([0] + [len(p) for p in parts])
        names = ["square", "strip", "infinity"]
        logger.debug(f"brouwer default compact: {sizes[-1]} samples")
        return self.make_compact(
            "default",
            concat_states(parts),
            4,
            pieces={name: np.arange(sizes[i], sizes[i + 1]) for i, name in enumerate(names)},
        )
