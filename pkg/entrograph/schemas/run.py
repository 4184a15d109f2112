from datetime import datetime
from typing import Optional

from pydantic import BaseModel

from entrograph.models import RunStatus


class RunCreate(BaseModel):
    command: str
    system: Optional[str] = None
    config_hash: Optional[str] = None


class RunRead(BaseModel):
    id: int
    command: str
    system: Optional[str] = None
    status: RunStatus
    config_hash: Optional[str] = None
    aggregate: Optional[str] = None
    wall_time: Optional[float] = None
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    error_message: Optional[str] = None

    class Config:
        from_attributes = True
