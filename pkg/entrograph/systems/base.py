import logging
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from entrograph.core.config import settings
from entrograph.core.errors import InvalidInputError, NonInvertibleError, UnknownSelectorError
from entrograph.schemas.growth import GrowthClass
from entrograph.uniformity.base import EntourageFamily, PointRef, SampledCompact, first_occurrences

logger = logging.getLogger(__name__)


def concat_states(batches: List[Any]) -> Any:
    if batches and batches[0].dtype == object:
        out = np.empty(sum(len(b) for b in batches), dtype=object)
        out[:] = [s for b in batches for s in b]
        return out
    return np.concatenate(batches)


class DynamicalSystem(ABC):
    """A homeomorphism (or map) of a compact space with sampled compacts.

    Subclasses step batches of states in their own representation and say how
    those states look to the entourage family (`features`) and to coding
    shapes (`coordinates`).
    """

    name: str = ""
    invertible: bool = True
    non_wandering_everything: bool = False
    expected_class: Optional[GrowthClass] = None
    shape_kinds: Tuple[str, ...] = ()
    default_levels: Tuple[int, ...] = (2, 3, 4, 5, 6)

    def __init__(self) -> None:
        self.entourages: EntourageFamily = self.build_entourages()

    @abstractmethod
    def build_entourages(self) -> EntourageFamily:
        pass

    @abstractmethod
    def step(self, states: Any) -> Any:
        """Apply the map once to a batch of states."""
        pass

    def step_inv(self, states: Any) -> Any:
        raise NonInvertibleError(self.name, "step_inv")

    @abstractmethod
    def features(self, states: Any) -> np.ndarray:
        pass

    @abstractmethod
    def coordinates(self, states: Any) -> np.ndarray:
        """Natural coordinates, shape (M, d), used by coding-family shapes."""
        pass

    @abstractmethod
    def from_coordinates(self, coords: Any) -> Any:
        pass

    @abstractmethod
    def non_wandering_states(self) -> Any:
        pass

    @abstractmethod
    def compact_builders(self) -> Dict[str, Callable[[int], SampledCompact]]:
        """Named compact selectors; builders take the ladder horizon."""
        pass

    def iterate(self, states: Any, times: int) -> Any:
        move = self.step if times >= 0 else self.step_inv
        for _ in range(abs(times)):
            states = move(states)
        return states

    def make_compact(
        self,
        label: str,
        states: Any,
        density_level: int,
        pieces: Optional[Dict[str, np.ndarray]] = None,
    ) -> SampledCompact:
        """A sampled compact with repeated states collapsed; pieces follow the surviving rows."""
        keep, inverse = first_occurrences(states)
        if len(keep) < len(states):
            logger.debug(f"compact '{label}': dropped {len(states) - len(keep)} repeated samples")
            states = states[keep]
            pieces = {name: np.unique(inverse[np.asarray(rows, dtype=np.int64)]) for name, rows in (pieces or {}).items()}
        return SampledCompact(
            label=label,
            states=states,
            features=self.features(states),
            density_level=density_level,
            pieces=pieces or {},
        )

    def state_batch(self, states: List[Any]) -> Any:
        """A batch holding the given individual states."""
        return np.asarray(states)

    def point(self, coords: Any) -> PointRef:
        states = self.from_coordinates(coords)
        return PointRef(state=states[0], feature=self.features(states)[0])

    def compact_names(self) -> List[str]:
        return sorted(self.compact_builders())

    def compact(self, selector: str = "default", ladder_horizon: Optional[int] = None) -> SampledCompact:
        """Build a named compact, or the union of names joined by '+'."""
        horizon = ladder_horizon or settings.ladder_horizon
        builders = self.compact_builders()
        names = [name.strip() for name in selector.split("+")]
        for name in names:
            if name not in builders:
                raise UnknownSelectorError(f"'{self.name}' has no compact '{name}' (known: {', '.join(self.compact_names())})")
        if len(names) == 1:
            return builders[names[0]](horizon)

        parts = [builders[name](horizon) for name in names]
        pieces, offset = {}, 0
        for name, part in zip(names, parts):
            pieces[name] = np.arange(offset, offset + len(part))
            offset += len(part)
        return self.make_compact(
            label=selector,
            states=concat_states([p.states for p in parts]),
            density_level=min(p.density_level for p in parts),
            pieces=pieces,
        )

    def default_compact(self, ladder_horizon: Optional[int] = None) -> SampledCompact:
        return self.compact("default", ladder_horizon)

    def power(self, r: int) -> "DynamicalSystem":
        if r < 1:
            raise InvalidInputError(f"power must be >= 1, got {r}")
        return self if r == 1 else PowerSystem(self, r)


class PowerSystem(DynamicalSystem):
    """f^r on the same space, entourages and compacts as f."""

    def __init__(self, base: DynamicalSystem, r: int):
        self.base = base
        self.r = r
        self.name = f"{base.name}^{r}"
        self.invertible = base.invertible
        self.shape_kinds = base.shape_kinds
        self.default_levels = base.default_levels
        super().__init__()

    def build_entourages(self) -> EntourageFamily:
        return self.base.entourages

    def step(self, states: Any) -> Any:
        return self.base.iterate(states, self.r)

    def step_inv(self, states: Any) -> Any:
        return self.base.iterate(states, -self.r)

    def state_batch(self, states: List[Any]) -> Any:
        return self.base.state_batch(states)

    def features(self, states: Any) -> np.ndarray:
        return self.base.features(states)

    def coordinates(self, states: Any) -> np.ndarray:
        return self.base.coordinates(states)

    def from_coordinates(self, coords: Any) -> Any:
        return self.base.from_coordinates(coords)

    def non_wandering_states(self) -> Any:
        return self.base.non_wandering_states()

    def compact_builders(self) -> Dict[str, Callable[[int], SampledCompact]]:
        return self.base.compact_builders()


class ExactIntervalMap(ABC):
    """One-dimensional monotone increasing homeomorphism with exact rational steps.

    `None` stands for the point at infinity where the space has one. The
    conjugacy sends the map to a translation by `conjugacy_shift`.
    """

    conjugacy_shift: float = 1.0

    @abstractmethod
    def exact_step(self, x: Optional[Fraction]) -> Optional[Fraction]:
        pass

    @abstractmethod
    def exact_step_inv(self, x: Optional[Fraction]) -> Optional[Fraction]:
        pass

    @abstractmethod
    def exact_domain_points(self, breakpoints: List[Fraction]) -> List[Optional[Fraction]]:
        """Representatives outside the span of `breakpoints`, fixed points included."""
        pass

    @abstractmethod
    def conjugacy(self, x: Fraction) -> float:
        pass
