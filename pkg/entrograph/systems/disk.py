"""Parabolic Mobius map of the closed unit disk.

Conjugating w -> w + 1 on the upper half-plane by the Cayley transform
C(w) = (w - i) / (w + i) gives z -> ((2i - 1) z + 1) / (-z + 2i + 1), whose
only fixed point is 1 on the boundary.
"""
from typing import Any, Callable, Dict

import numpy as np

from entrograph.core.config import settings
from entrograph.schemas.growth import GrowthClass, GrowthLabel
from entrograph.systems.base import DynamicalSystem, concat_states
from entrograph.systems.line import LADDER_MARGIN
from entrograph.uniformity.base import SampledCompact
from entrograph.uniformity.metric import MetricFamily, euclidean_distance, metric_family

GRID_STEP = 1.0 / 64
BOUNDARY_POINTS = 512
# half-plane heights of the escape ladders; 0 runs along the boundary circle
LADDER_HEIGHTS = (0.0, 0.25, 1.0, 4.0)


def cayley(w: Any) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    return (w - 1j) / (w + 1j)


class ParabolicDisk(DynamicalSystem):
    name = "parabolic-disk"
    shape_kinds = ("rect",)
    expected_class = GrowthClass(label=GrowthLabel.LINEAR, degree=1.0)

    def build_entourages(self) -> MetricFamily:
        return metric_family(euclidean_distance, eps0=1.0, k_min=0, k_max=16)

    def step(self, states: Any) -> np.ndarray:
        z = np.asarray(states, dtype=complex)
        return ((2j - 1) * z + 1) / (-z + (2j + 1))

    def step_inv(self, states: Any) -> np.ndarray:
        z = np.asarray(states, dtype=complex)
        return ((2j + 1) * z - 1) / (z + (2j - 1))

    def features(self, states: Any) -> np.ndarray:
        z = np.asarray(states, dtype=complex).reshape(-1)
        return np.stack([z.real, z.imag], axis=1)

    def coordinates(self, states: Any) -> np.ndarray:
        return self.features(states)

    def from_coordinates(self, coords: Any) -> np.ndarray:
        coords = np.asarray(coords)
        if np.iscomplexobj(coords):
            return coords.reshape(-1).astype(complex)
        coords = coords.astype(float).reshape(-1, 2)
        return coords[:, 0] + 1j * coords[:, 1]

    def non_wandering_states(self) -> np.ndarray:
        return np.array([1.0 + 0.0j])

    def compact_builders(self) -> Dict[str, Callable[[int], SampledCompact]]:
        return {
            "default": self._default,
            "grid": lambda horizon: self.make_compact("grid", self._grid(), 6),
            "boundary": lambda horizon: self.make_compact("boundary", self._boundary(), 6),
        }

    def _grid(self) -> np.ndarray:
        axis = np.arange(-1.0, 1.0 + GRID_STEP / 2, GRID_STEP)
        z = (axis[:, None] + 1j * axis[None, :]).reshape(-1)
        return z[np.abs(z) <= 1.0]

    def _boundary(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(BOUNDARY_POINTS) / BOUNDARY_POINTS)

    def _ladders(self, horizon: int) -> np.ndarray:
        density = settings.ladder_density
        t = np.arange(-(horizon + LADDER_MARGIN) * density, LADDER_MARGIN * density + 1) / density
        return np.concatenate([cayley(t + 1j * h) for h in LADDER_HEIGHTS])

    def _default(self, horizon: int) -> SampledCompact:
        parts = [self._grid(), self._boundary(), self._ladders(horizon), self.non_wandering_states()]
        sizes = np.cumsum([0] + [len(p) for p in parts])
        names = ["grid", "boundary", "ladder", "fixed"]
        return self.make_compact(
            "default",
            concat_states(parts),
            6,
            pieces={name: np.arange(sizes[i], sizes[i + 1]) for i, name in enumerate(names)},
        )
