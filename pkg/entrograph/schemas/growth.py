import math
from enum import Enum
from typing import Callable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, field_validator, model_validator


def term_ratio(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a(n) / b(n), with 0 / 0 = 0 and a / 0 = inf for a > 0."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return np.divide(a, b, out=np.where(a > 0, np.inf, 0.0), where=b > 0)


class GrowthSeries(BaseModel):
    """Finite-horizon representative a(1..N) of an order of growth.

    `log_values` is set for series whose terms overflow a float (e.g. exp(3n) at
    N = 256); projections then work in log space directly.
    """

    values: List[float]
    log_values: Optional[List[float]] = None
    label: Optional[str] = None

    class Config:
        frozen = True

    @field_validator("values")
    @classmethod
    def check_values(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("series must have horizon >= 1")
        for n, value in enumerate(values, start=1):
            if math.isnan(value) or value < 0:
                raise ValueError(f"negative or undefined value {value} at n={n}")
        for n in range(1, len(values)):
            if values[n] < values[n - 1]:
                raise ValueError(f"series decreases at n={n + 1}: {values[n - 1]} > {values[n]}")
        return values

    @model_validator(mode="after")
    def check_log_values(self) -> "GrowthSeries":
        if self.log_values is not None and len(self.log_values) != len(self.values):
            raise ValueError("log_values and values differ in length")
        return self

    @property
    def horizon(self) -> int:
        return len(self.values)

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def log_array(self) -> np.ndarray:
        """log a(n), with log 0 taken as 0."""
        if self.log_values is not None:
            logs = np.asarray(self.log_values, dtype=float)
            return np.where(np.isneginf(logs), 0.0, logs)
        values = self.array()
        with np.errstate(divide="ignore"):
            return np.where(values > 0, np.log(np.where(values > 0, values, 1.0)), 0.0)

    def at(self, n: int) -> float:
        return self.values[n - 1]

    def scaled(self, c: float) -> "GrowthSeries":
        log_values = None
        if self.log_values is not None:
            log_values = [v + math.log(c) for v in self.log_values]
        return GrowthSeries(values=[c * v for v in self.values], log_values=log_values, label=self.label)

    def truncated(self, horizon: int) -> "GrowthSeries":
        log_values = self.log_values[:horizon] if self.log_values is not None else None
        return GrowthSeries(values=self.values[:horizon], log_values=log_values, label=self.label)

    def ratio_series(self, other: "GrowthSeries") -> np.ndarray:
        return term_ratio(self.array(), other.array())

    @classmethod
    def from_values(cls, values: Sequence[float], label: Optional[str] = None) -> "GrowthSeries":
        return cls(values=[float(v) for v in values], label=label)

    @classmethod
    def from_function(cls, func: Callable[[int], float], horizon: int, label: Optional[str] = None) -> "GrowthSeries":
        return cls(values=[float(func(n)) for n in range(1, horizon + 1)], label=label)

    @classmethod
    def from_log_values(cls, log_values: Sequence[float], label: Optional[str] = None) -> "GrowthSeries":
        values = [math.exp(v) if v < 709.0 else math.inf for v in log_values]
        return cls(values=values, log_values=[float(v) for v in log_values], label=label)


class Relation(str, Enum):
    EQUIVALENT = "equivalent"
    LESS = "less"
    GREATER = "greater"
    INCOMPARABLE = "incomparable_at_horizon"


class ComparisonVerdict(BaseModel):
    relation: Relation
    witness_constant: Optional[float] = None
    reverse_constant: Optional[float] = None


class GrowthLabel(str, Enum):
    BOUNDED = "bounded"
    LINEAR = "linear"
    POLYNOMIAL = "polynomial"
    EXPONENTIAL = "exponential"


class GrowthClass(BaseModel):
    label: GrowthLabel
    degree: float = 0.0
    rate: float = 0.0
    fit_residual: float = 0.0

    def key(self) -> tuple:
        if self.label == GrowthLabel.EXPONENTIAL:
            return (2, self.rate)
        if self.label == GrowthLabel.BOUNDED:
            return (0, 0.0)
        if self.label == GrowthLabel.LINEAR:
            return (1, 1.0)
        return (1, self.degree)

    def at_most(self, other: "GrowthClass", tolerance: float = 0.25) -> bool:
        mine, theirs = self.key(), other.key()
        if mine[0] != theirs[0]:
            return mine[0] < theirs[0]
        return mine[1] <= theirs[1] + tolerance
