"""Translations of compactified lines.

The real line is closed up by one point at infinity (stored as +inf) and
measured through the chordal embedding t -> (2t, t^2 - 1) / (t^2 + 1).
"""
import math
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from entrograph.core.config import settings
from entrograph.core.errors import InvalidInputError
from entrograph.schemas.growth import GrowthClass, GrowthLabel
from entrograph.systems.base import DynamicalSystem, ExactIntervalMap, concat_states
from entrograph.uniformity.base import SampledCompact
from entrograph.uniformity.metric import MetricFamily, euclidean_distance, metric_family

# samples this far past the origin on the right of every ladder
LADDER_MARGIN = 8
# chordal radius of the default ball around infinity
INFINITY_BALL_RADIUS = 0.3
RING_POINTS = 9


def chordal_embedding(t: Any) -> np.ndarray:
    t = np.asarray(t, dtype=float).reshape(-1)
    finite = np.isfinite(t)
    safe = np.where(finite, t, 0.0)
    denom = safe * safe + 1.0
    out = np.empty((len(t), 2))
    out[:, 0] = np.where(finite, 2.0 * safe / denom, 0.0)
    out[:, 1] = np.where(finite, (safe * safe - 1.0) / denom, 1.0)
    return out


def infinity_ball_threshold(radius: float) -> float:
    """Smallest |t| whose chordal distance to infinity is at most `radius`."""
    return math.sqrt((2.0 / radius) ** 2 - 1.0)


def line_ladder(horizon: int) -> np.ndarray:
    density = settings.ladder_density
    return np.arange(-(horizon + LADDER_MARGIN) * density, LADDER_MARGIN * density + 1) / density


def ring(radius: float) -> np.ndarray:
    scales = radius * 2.0 ** np.arange(RING_POINTS)
    return np.concatenate([-scales, scales])


class TranslationLine(DynamicalSystem, ExactIntervalMap):
    name = "translation-line"
    shape_kinds = ("interval",)
    expected_class = GrowthClass(label=GrowthLabel.LINEAR, degree=1.0)
    conjugacy_shift = 1.0

    def build_entourages(self) -> MetricFamily:
        return metric_family(euclidean_distance, eps0=1.0, k_min=0, k_max=16)

    def step(self, states: Any) -> np.ndarray:
        return np.asarray(states, dtype=float) + 1.0

    def step_inv(self, states: Any) -> np.ndarray:
        return np.asarray(states, dtype=float) - 1.0

    def features(self, states: Any) -> np.ndarray:
        return chordal_embedding(states)

    def coordinates(self, states: Any) -> np.ndarray:
        return np.asarray(states, dtype=float).reshape(-1, 1)

    def from_coordinates(self, coords: Any) -> np.ndarray:
        t = np.asarray(coords, dtype=float).reshape(-1)
        return np.where(np.isinf(t), np.inf, t)

    def non_wandering_states(self) -> np.ndarray:
        return np.array([np.inf])

    def compact_builders(self) -> Dict[str, Callable[[int], SampledCompact]]:
        return {
            "default": self._default,
            "ball-infinity": self._ball_infinity,
            "middle": lambda horizon: self.make_compact(
                "middle", np.arange(-5 * settings.ladder_density, 5 * settings.ladder_density + 1) / settings.ladder_density, 3
            ),
        }

    def _default(self, horizon: int) -> SampledCompact:
        ladder = line_ladder(horizon)
        outer = np.concatenate([ring(settings.ring_radius), [np.inf]])
        return self.make_compact(
            "default",
            concat_states([ladder, outer]),
            3,
            pieces={"ladder": np.arange(len(ladder)), "ring": np.arange(len(ladder), len(ladder) + len(outer))},
        )

    def _ball_infinity(self, horizon: int) -> SampledCompact:
        threshold = infinity_ball_threshold(INFINITY_BALL_RADIUS)
        ladder = line_ladder(horizon)
        far = ladder[np.abs(ladder) >= threshold]
        right = threshold + np.arange(0, LADDER_MARGIN * settings.ladder_density + 1) / settings.ladder_density
        return self.make_compact("ball-infinity", concat_states([far, right, [np.inf]]), 3)

    # exact rational path

    def exact_step(self, x: Optional[Fraction]) -> Optional[Fraction]:
        return None if x is None else x + 1

    def exact_step_inv(self, x: Optional[Fraction]) -> Optional[Fraction]:
        return None if x is None else x - 1

    def exact_domain_points(self, breakpoints: List[Fraction]) -> List[Optional[Fraction]]:
        if not breakpoints:
            return [Fraction(0), None]
        return [min(breakpoints) - 1, max(breakpoints) + 1, None]

    def conjugacy(self, x: Fraction) -> float:
        return float(x)


class HawaiianEarring(DynamicalSystem):
    """Several compactified lines sharing their point at infinity, each translated by +1.

    Line i is drawn as the circle of radius 1/(i+1) through the origin, with
    infinity at the origin. States are rows (line, t).
    """

    name = "hawaiian-earring"
    shape_kinds = ()
    expected_class = GrowthClass(label=GrowthLabel.LINEAR, degree=1.0)

    def __init__(self, lines: int = 3):
        if lines < 1:
            raise InvalidInputError(f"need at least one line, got {lines}")
        self.lines = int(lines)
        super().__init__()

    def build_entourages(self) -> MetricFamily:
        return metric_family(euclidean_distance, eps0=1.0, k_min=0, k_max=16)

    def _normalize(self, states: np.ndarray) -> np.ndarray:
        states = np.array(states, dtype=float).reshape(-1, 2)
        at_infinity = np.isinf(states[:, 1])
        states[at_infinity] = (0.0, np.inf)
        return states

    def step(self, states: Any) -> np.ndarray:
        out = np.array(states, dtype=float)
        out[:, 1] += 1.0
        return out

    def step_inv(self, states: Any) -> np.ndarray:
        out = np.array(states, dtype=float)
        out[:, 1] -= 1.0
        return out

    def features(self, states: Any) -> np.ndarray:
        states = np.asarray(states, dtype=float)
        radius = 1.0 / (states[:, 0] + 1.0)
        unit = chordal_embedding(states[:, 1])
        return np.stack([radius * unit[:, 0], radius * (unit[:, 1] - 1.0)], axis=1)

    def coordinates(self, states: Any) -> np.ndarray:
        return np.asarray(states, dtype=float)[:, 1:2]

    def from_coordinates(self, coords: Any) -> np.ndarray:
        return self._normalize(coords)

    def non_wandering_states(self) -> np.ndarray:
        return np.array([[0.0, np.inf]])

    def compact_builders(self) -> Dict[str, Callable[[int], SampledCompact]]:
        return {"default": self._default}

    def _default(self, horizon: int) -> SampledCompact:
        ladder = line_ladder(horizon)
        rows = [np.stack([np.full(len(ladder), float(i)), ladder], axis=1) for i in range(self.lines)]
        rows.append(np.array([[0.0, np.inf]]))
        return self.make_compact("default", np.concatenate(rows), 3)
