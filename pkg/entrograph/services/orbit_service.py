import logging
from collections import OrderedDict
from typing import Optional, Tuple

import numpy as np

from entrograph.systems.base import DynamicalSystem
from entrograph.uniformity.base import SampledCompact

logger = logging.getLogger(__name__)

CACHE_ENTRIES = 8


class OrbitCache:
    """Features of every sample at times 0..times-1, stacked as (times, M, ...)."""

    def __init__(self, system: DynamicalSystem, compact: SampledCompact, times: int, inverse: bool = False):
        self.system = system
        self.compact = compact
        self.inverse = inverse
        self._move = system.step_inv if inverse else system.step
        self._frames = [np.asarray(compact.features)]
        self._states = compact.states
        self.extend(times)

    @property
    def times(self) -> int:
        return len(self._frames)

    @property
    def size(self) -> int:
        return len(self.compact)

    def extend(self, times: int) -> None:
        while len(self._frames) < times:
            self._states = self._move(self._states)
            self._frames.append(np.asarray(self.system.features(self._states)))
        self._stacked: Optional[np.ndarray] = None

    @property
    def features(self) -> np.ndarray:
        if self._stacked is None or len(self._stacked) != len(self._frames):
            self._stacked = np.stack(self._frames)
        return self._stacked


class OrbitService:
    """Builds orbit caches once per (system, compact, direction) and reuses them."""

    _cache: "OrderedDict[Tuple[int, int, bool], OrbitCache]" = OrderedDict()

    @classmethod
    def orbits(cls, system: DynamicalSystem, compact: SampledCompact, times: int, inverse: bool = False) -> OrbitCache:
        key = (id(system), id(compact), inverse)
        cache = cls._cache.get(key)
        if cache is not None and cache.system is system and cache.compact is compact:
            if cache.times < times:
                cache.extend(times)
            cls._cache.move_to_end(key)
            return cache

        logger.debug(f"orbit cache: {system.name} on '{compact.label}' ({len(compact)} samples, {times} times)")
        cache = OrbitCache(system, compact, times, inverse)
        cls._cache[key] = cache
        while len(cls._cache) > CACHE_ENTRIES:
            cls._cache.popitem(last=False)
        return cache

    @classmethod
    def clear(cls) -> None:
        cls._cache.clear()
