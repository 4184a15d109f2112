from typing import Any, Callable

import numpy as np

from entrograph.uniformity.base import EntourageFamily

Distance = Callable[[Any, Any], np.ndarray]


def euclidean_distance(fp: Any, fq: Any) -> np.ndarray:
    """Distance between embedded points; features carry coordinates on the last axis."""
    diff = np.asarray(fp, dtype=float) - np.asarray(fq, dtype=float)
    return np.sqrt(np.sum(diff * diff, axis=-1))


def arc_distance(fp: Any, fq: Any) -> np.ndarray:
    """Arc-length metric on R/Z for features of shape (..., 1)."""
    diff = np.abs(np.asarray(fp, dtype=float) - np.asarray(fq, dtype=float))[..., 0] % 1.0
    return np.minimum(diff, 1.0 - diff)


class MetricFamily(EntourageFamily):
    """Entourages {d < eps0 * 2^-k}."""

    def __init__(self, distance: Distance, eps0: float, k_min: int = 0, k_max: int = 16):
        super().__init__(k_min, k_max)
        self.distance = distance
        self.eps0 = eps0

    def epsilon(self, k: int) -> float:
        return self.eps0 * 2.0 ** (-k)

    def contains(self, k: int, fp: Any, fq: Any) -> np.ndarray:
        return self.distance(fp, fq) < self.epsilon(k)

    def square_root_level(self, k: int) -> int:
        return k + 1

    def level_for(self, epsilon: float) -> int:
        """Coarsest level whose radius is at most `epsilon`."""
        k = self.k_min
        while self.epsilon(k) > epsilon and k < self.k_max:
            k += 1
        return k


def metric_family(distance: Distance, eps0: float, k_min: int = 0, k_max: int = 16) -> MetricFamily:
    return MetricFamily(distance, eps0, k_min, k_max)
