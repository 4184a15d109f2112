import re
from datetime import datetime
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from entrograph.schemas.coding import CodingCounts, HittingData, SingularityResult, VisitsResult, WanderingResult
from entrograph.schemas.growth import ComparisonVerdict, GrowthClass
from entrograph.schemas.profile import CheckResult, CountProfile

SCHEMA_VERSION = "1.0"
LEVEL_RANGE_RE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")
MIN_HORIZON = 16


def parse_levels(value: Any) -> List[int]:
    """"4..8", "4,5,6" or a list of ints."""
    if isinstance(value, str):
        match = LEVEL_RANGE_RE.match(value)
        if match:
            lo, hi = int(match.group(1)), int(match.group(2))
            return list(range(lo, hi + 1))
        return [int(part) for part in value.split(",") if part.strip()]
    if isinstance(value, int):
        return [value]
    return [int(v) for v in value]


class RunConfig(BaseModel):
    """One experiment; unknown keys are rejected."""

    command: str = "entropy"
    system: str = "north-south-interval"
    params: Dict[str, Any] = Field(default_factory=dict)
    compact: str = "default"
    levels: Optional[List[int]] = None
    horizon: int = 256
    seed: int = 0
    threads: int = 1
    out: Optional[str] = None
    family: Optional[str] = None
    n0_max: int = 64
    search_bound: Optional[int] = None
    linear_band: Optional[Tuple[float, float]] = None
    tail_fraction: Optional[float] = None

    class Config:
        extra = "forbid"

    @field_validator("levels", mode="before")
    @classmethod
    def normalize_levels(cls, value: Any) -> Optional[List[int]]:
        if value is None:
            return None
        return parse_levels(value)

    @model_validator(mode="after")
    def check_config(self) -> "RunConfig":
        if self.horizon < MIN_HORIZON:
            raise ValueError(f"horizon must be >= {MIN_HORIZON}, got {self.horizon}")
        if self.levels is not None:
            if not self.levels:
                raise ValueError("levels must be non-empty")
            if self.levels != sorted(set(self.levels)):
                raise ValueError(f"levels must be strictly ascending, got {self.levels}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        return self

    def hashed_fields(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude={"out", "threads"})


class LevelSummary(BaseModel):
    k: int
    growth_class: GrowthClass = Field(alias="class")
    sandwich_ok: Optional[bool] = None

    class Config:
        populate_by_name = True


class CodingSummary(BaseModel):
    counts: CodingCounts
    growth_class: GrowthClass
    versus_linear: ComparisonVerdict
    wandering: List[WanderingResult] = Field(default_factory=list)
    max_visits: List[VisitsResult] = Field(default_factory=list)
    hitting: List[HittingData] = Field(default_factory=list)
    singularity: Optional[SingularityResult] = None


class Timing(BaseModel):
    created_at: datetime
    wall_time: float


class RunReport(BaseModel):
    """Everything one command emits as JSON; `timing` is left out of the config hash."""

    schema_version: str = SCHEMA_VERSION
    command: str
    system: Optional[str] = None
    config: Dict[str, Any]
    config_hash: str
    levels: List[LevelSummary] = Field(default_factory=list)
    aggregate: Optional[GrowthClass] = None
    status: Optional[str] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)
    profile: Optional[CountProfile] = None
    coding: Optional[CodingSummary] = None
    checks: List[CheckResult] = Field(default_factory=list)
    timing: Optional[Timing] = None

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
