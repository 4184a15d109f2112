from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from entrograph.schemas.growth import GrowthClass, GrowthSeries


class ProfileStatus(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable_at_levels"


class LevelRecord(BaseModel):
    k: int
    s_series: GrowthSeries
    g_series: Optional[GrowthSeries] = None
    sandwich_ok: Optional[bool] = None
    sandwich_violation_n: Optional[int] = None
    growth_class: GrowthClass

    class Config:
        frozen = True


class CountProfile(BaseModel):
    """Per-level separated counts of one system on one compact, with the aggregate class."""

    system: str
    compact: str
    levels: List[LevelRecord]
    aggregate: Optional[GrowthClass] = None
    status: ProfileStatus
    metadata: Dict[str, Any] = Field(default_factory=dict)
    pieces: Dict[str, List[GrowthSeries]] = Field(default_factory=dict)
    piece_sup: List[GrowthSeries] = Field(default_factory=list)

    class Config:
        frozen = True

    def level(self, k: int) -> LevelRecord:
        for record in self.levels:
            if record.k == k:
                return record
        raise KeyError(k)


class SandwichResult(BaseModel):
    ok: bool
    k: int
    k_fine: int
    violation_n: Optional[int] = None
    s_coarse: List[int]
    g_fine: List[int]
    s_fine: List[int]


class LyapunovResult(BaseModel):
    stable: bool
    target_k: int
    witness_level: Optional[int] = None
    horizon: int
    inverse: bool = False
    counterexample: Optional[Tuple[int, int]] = None
    counterexample_states: Optional[Tuple[str, str]] = None


class RegularityResult(BaseModel):
    regular: bool
    target_k: int
    horizon: int
    witness_level: Optional[int] = None
    half_horizon_witness_level: Optional[int] = None


class CheckResult(BaseModel):
    """Outcome of a property check; `details` carries the numbers behind it."""

    name: str
    passed: bool
    details: Dict[str, Any] = Field(default_factory=dict)
