import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from entrograph.core.errors import FamilyValidationError
from entrograph.schemas.growth import GrowthSeries

SHAPE_ARITY = {"interval": 2, "arc": 2, "rect": 4}


def parse_rational(value: Any) -> Fraction:
    """Numbers and strings such as "1/4" or "0.25", exactly."""
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise FamilyValidationError(f"not a rational endpoint: {value!r}")


class Shape(BaseModel):
    """One of {"interval": [a, b]}, {"rect": [x0, x1, y0, y1]}, {"arc": [a, b]} or {"union": [shape, ...]}."""

    kind: str
    bounds: List[str] = Field(default_factory=list)
    parts: List["Shape"] = Field(default_factory=list)

    @model_validator(mode="before")
    @classmethod
    def from_document(cls, data: Any) -> Any:
        if isinstance(data, dict) and "kind" not in data:
            if len(data) != 1:
                raise ValueError(f"shape must have exactly one key, got {sorted(data)}")
            ((kind, value),) = data.items()
            if kind == "union":
                return {"kind": kind, "parts": value}
            return {"kind": kind, "bounds": value}
        return data

    @field_validator("bounds", mode="before")
    @classmethod
    def normalize_bounds(cls, bounds: Any) -> List[str]:
        return [str(parse_rational(b)) for b in bounds]

    @model_validator(mode="after")
    def check_shape(self) -> "Shape":
        if self.kind == "union":
            if not self.parts or self.bounds:
                raise ValueError("a union needs parts and no bounds")
            return self
        if self.kind not in SHAPE_ARITY:
            raise ValueError(f"unknown shape kind '{self.kind}'")
        if len(self.bounds) != SHAPE_ARITY[self.kind]:
            raise ValueError(f"{self.kind} needs {SHAPE_ARITY[self.kind]} endpoints, got {len(self.bounds)}")
        b = self.rationals
        if self.kind == "interval" and b[0] > b[1]:
            raise ValueError(f"empty interval [{b[0]}, {b[1]}]")
        if self.kind == "rect" and (b[0] > b[1] or b[2] > b[3]):
            raise ValueError(f"empty rectangle {self.bounds}")
        if self.kind == "arc" and not all(0 <= x < 1 for x in b):
            raise ValueError(f"arc endpoints must lie in [0, 1), got {self.bounds}")
        return self

    @property
    def rationals(self) -> List[Fraction]:
        return [Fraction(b) for b in self.bounds]

    def kinds(self) -> List[str]:
        if self.kind == "union":
            return [k for part in self.parts for k in part.kinds()]
        return [self.kind]

    def leaves(self) -> List["Shape"]:
        if self.kind == "union":
            return [leaf for part in self.parts for leaf in part.leaves()]
        return [self]

    def intervals(self) -> List[Tuple[Fraction, Fraction]]:
        """Closed intervals making up an interval-valued shape."""
        out = []
        for leaf in self.leaves():
            if leaf.kind != "interval":
                raise FamilyValidationError(f"{leaf.kind} is not an interval shape")
            a, b = leaf.rationals
            out.append((a, b))
        return out

    def contains(self, coords: np.ndarray) -> np.ndarray:
        """Membership of rows of natural coordinates; non-finite rows are outside."""
        coords = np.asarray(coords, dtype=float)
        if self.kind == "union":
            mask = np.zeros(len(coords), dtype=bool)
            for part in self.parts:
                mask |= part.contains(coords)
            return mask
        b = [float(x) for x in self.rationals]
        with np.errstate(invalid="ignore"):
            if self.kind == "interval":
                return (coords[:, 0] >= b[0]) & (coords[:, 0] <= b[1])
            if self.kind == "rect":
                return (coords[:, 0] >= b[0]) & (coords[:, 0] <= b[1]) & (coords[:, 1] >= b[2]) & (coords[:, 1] <= b[3])
            x = coords[:, 0]
            if b[0] <= b[1]:
                return (x >= b[0]) & (x <= b[1])
            return (x >= b[0]) | (x <= b[1])

    def contains_exact(self, x: Optional[Fraction]) -> bool:
        return x is not None and any(a <= x <= b for a, b in self.intervals())

    def _boxes(self) -> List[List[Tuple[Fraction, Fraction]]]:
        boxes = []
        for leaf in self.leaves():
            b = leaf.rationals
            if leaf.kind == "interval":
                boxes.append([(b[0], b[1])])
            elif leaf.kind == "rect":
                boxes.append([(b[0], b[1]), (b[2], b[3])])
            elif b[0] <= b[1]:
                boxes.append([(b[0], b[1])])
            else:
                boxes += [[(b[0], Fraction(1))], [(Fraction(0), b[1])]]
        return boxes

    def overlaps(self, other: "Shape") -> bool:
        """Exact intersection test of closed shapes."""
        for mine in self._boxes():
            for theirs in other._boxes():
                if all(a0 <= b1 and b0 <= a1 for (a0, a1), (b0, b1) in zip(mine, theirs)):
                    return True
        return False


class FamilyMember(BaseModel):
    label: str
    shape: Shape
    declared_wandering: bool = True


class CodingFamily(BaseModel):
    """Finite family of subsets avoiding the non-wandering set; ∞ labels the complement of their union."""

    members: List[FamilyMember]

    class Config:
        frozen = True

    @field_validator("members")
    @classmethod
    def check_members(cls, members: List[FamilyMember]) -> List[FamilyMember]:
        if not members:
            raise ValueError("a coding family needs at least one member")
        labels = [m.label for m in members]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate member labels in {labels}")
        if "∞" in labels:
            raise ValueError("'∞' is reserved for the complement")
        return members

    @property
    def disjoint(self) -> bool:
        return not any(
            a.shape.overlaps(b.shape) for i, a in enumerate(self.members) for b in self.members[i + 1 :]
        )

    @property
    def labels(self) -> List[str]:
        return [m.label for m in self.members]

    def union(self) -> "CodingFamily":
        """The single-member family {∪F}."""
        shape = Shape(kind="union", parts=[m.shape for m in self.members])
        return CodingFamily(members=[FamilyMember(label="+".join(self.labels), shape=shape)])

    def subfamily(self, indices: List[int]) -> "CodingFamily":
        return CodingFamily(members=[self.members[i] for i in indices])

    @classmethod
    def from_document(cls, document: Union[str, Dict[str, Any]]) -> "CodingFamily":
        try:
            data = json.loads(document) if isinstance(document, str) else document
            return cls.model_validate(data)
        except FamilyValidationError:
            raise
        except Exception as e:
            raise FamilyValidationError(f"invalid family document: {e}")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "CodingFamily":
        return cls.from_document(Path(path).read_text())


class CodingCounts(BaseModel):
    family: List[str]
    disjoint: bool
    horizon: int
    exact: bool
    series: GrowthSeries
    universe_size: Optional[int] = None
    overflow_orbits: int = 0


class WanderingResult(BaseModel):
    label: str
    wandering: bool
    bound: int
    exact: bool
    first_return: Optional[int] = None


class VisitsResult(BaseModel):
    label: str
    bound: int
    exact: bool
    max_visits: int


class HittingData(BaseModel):
    source: str
    target: str
    bound: int
    hits: List[int]

    @field_validator("hits")
    @classmethod
    def sorted_hits(cls, hits: List[int]) -> List[int]:
        return sorted(set(hits))


class SingularWitness(BaseModel):
    n0: int
    sample: int
    state: str
    times: List[int]


class SingularityResult(BaseModel):
    singular: bool
    n0_max: int
    search_bound: int
    max_gap: Optional[int] = None
    certified_bound: Optional[float] = None
    witnesses: List[SingularWitness] = Field(default_factory=list)


Shape.model_rebuild()
