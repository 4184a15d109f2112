from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from entrograph.core.errors import InvalidInputError, LevelOutOfRangeError


def _state_key(state: Any) -> Any:
    if isinstance(state, np.ndarray):
        return tuple(state.ravel().tolist())
    if isinstance(state, (np.floating, np.integer, np.complexfloating)):
        return state.item()
    return state


def first_occurrences(states: Any) -> Tuple[np.ndarray, np.ndarray]:
    """Index of the first copy of each distinct state, and every row's position among those copies."""
    seen: Dict[Any, int] = {}
    keep: List[int] = []
    inverse = np.empty(len(states), dtype=np.int64)
    for i, state in enumerate(states):
        key = _state_key(state)
        if key not in seen:
            seen[key] = len(keep)
            keep.append(i)
        inverse[i] = seen[key]
    return np.asarray(keep, dtype=np.int64), inverse


@dataclass(frozen=True, eq=False)
class PointRef:
    """A sampled state together with the feature its entourage family compares.

    Equality and hashing go through the exact state only.
    """

    state: Any
    feature: Any
    index: Optional[int] = None

    def key(self) -> Any:
        return _state_key(self.state)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PointRef) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())


@dataclass
class SampledCompact:
    """Finite sample standing in for a compact set.

    `states` is whatever batch representation the owning system steps;
    `features` is aligned with it row by row. `pieces` maps labels of the
    constituent compacts to index arrays, so restrictions and unions keep
    their provenance.
    """

    label: str
    states: Any
    features: np.ndarray
    density_level: int
    pieces: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self) == 0:
            raise InvalidInputError(f"compact '{self.label}' is empty")
        if len(self.features) != len(self):
            raise InvalidInputError(f"compact '{self.label}' has misaligned features")
        if not self.pieces:
            self.pieces = {self.label: np.arange(len(self))}

    def __len__(self) -> int:
        return len(self.states)

    def point(self, index: int) -> PointRef:
        return PointRef(state=self.states[index], feature=self.features[index], index=index)

    def points(self) -> List[PointRef]:
        return [self.point(i) for i in range(len(self))]

    def subset(self, indices: Sequence[int], label: Optional[str] = None) -> "SampledCompact":
        indices = np.asarray(indices, dtype=np.int64)
        return SampledCompact(
            label=label or self.label,
            states=self.states[indices],
            features=self.features[indices],
            density_level=self.density_level,
        )

    def piece(self, name: str) -> "SampledCompact":
        if name not in self.pieces:
            raise InvalidInputError(f"compact '{self.label}' has no piece '{name}'")
        return self.subset(self.pieces[name], label=name)

    def find(self, point: PointRef) -> Optional[int]:
        key = point.key()
        for i in range(len(self)):
            if _state_key(self.states[i]) == key:
                return i
        return None


class EntourageFamily(ABC):
    """Indexed base of a uniform structure; larger k means a smaller entourage."""

    def __init__(self, k_min: int, k_max: int):
        if k_min > k_max:
            raise InvalidInputError(f"empty level range {k_min}..{k_max}")
        self.k_min = k_min
        self.k_max = k_max

    def check_level(self, k: int) -> None:
        if not self.k_min <= k <= self.k_max:
            raise LevelOutOfRangeError(k, self.k_min, self.k_max)

    @property
    def levels(self) -> range:
        return range(self.k_min, self.k_max + 1)

    @abstractmethod
    def contains(self, k: int, fp: Any, fq: Any) -> np.ndarray:
        """Vectorized membership of feature pairs in entourage k (broadcasting)."""
        pass

    @abstractmethod
    def square_root_level(self, k: int) -> int:
        """A level whose entourage composed with itself lies inside level k."""
        pass

    def membership(self, k: int, p: PointRef, q: PointRef) -> bool:
        self.check_level(k)
        return bool(np.all(self.contains(k, p.feature, q.feature)))


def ball(family: EntourageFamily, p: PointRef, k: int, universe: SampledCompact) -> List[PointRef]:
    family.check_level(k)
    mask = np.asarray(family.contains(k, p.feature, universe.features), dtype=bool)
    return [universe.point(i) for i in np.flatnonzero(mask)]


def _pair_matrix(family: EntourageFamily, k: int, features: np.ndarray) -> np.ndarray:
    fp = features[:, None] if features.ndim == 1 else features[:, None, :]
    fq = features[None, :] if features.ndim == 1 else features[None, :, :]
    return np.asarray(family.contains(k, fp, fq), dtype=bool)


def is_small(family: EntourageFamily, points: Sequence[PointRef], k: int) -> bool:
    family.check_level(k)
    if len(points) <= 1:
        return True
    features = np.asarray([p.feature for p in points])
    return bool(_pair_matrix(family, k, features).all())


def separating_level(family: EntourageFamily, p: PointRef, q: PointRef) -> Optional[int]:
    for k in family.levels:
        if not family.membership(k, p, q):
            return k
    return None


def check_family_axioms(
    family: EntourageFamily,
    universe: SampledCompact,
    k: int,
    max_points: int = 1000,
    seed: int = 0,
) -> Optional[str]:
    """Check symmetry, reflexivity, nesting and composition on sampled pairs.

    Returns a description of the first violation, or None. Universes larger
    than `max_points` are checked on a seeded random subsample.
    """
    family.check_level(k)
    features = universe.features
    if len(universe) > max_points:
        rng = np.random.default_rng(seed)
        features = features[np.sort(rng.choice(len(universe), size=max_points, replace=False))]

    inside = _pair_matrix(family, k, features)
    if not np.array_equal(inside, inside.T):
        i, j = np.argwhere(inside != inside.T)[0]
        return f"symmetry fails at level {k} for sample pair ({i}, {j})"
    if not inside.diagonal().all():
        return f"reflexivity fails at level {k} for sample {int(np.flatnonzero(~inside.diagonal())[0])}"
    if k < family.k_max:
        finer = _pair_matrix(family, k + 1, features)
        if (finer & ~inside).any():
            i, j = np.argwhere(finer & ~inside)[0]
            return f"nesting fails between levels {k + 1} and {k} for sample pair ({i}, {j})"

    root = family.square_root_level(k)
    if root <= family.k_max:
        half = _pair_matrix(family, root, features).astype(np.float32)
        composed = (half @ half) > 0
        if (composed & ~inside).any():
            i, j = np.argwhere(composed & ~inside)[0]
            return f"composition fails: level {root} twice escapes level {k} for sample pair ({i}, {j})"
    return None
