from enum import Enum as PyEnum

from sqlalchemy import Column, DateTime, Enum, Float, Integer, String, Text
from sqlalchemy.sql import func

from entrograph.core.db import Base


class RunStatus(str, PyEnum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


class RunRecord(Base):
    __tablename__ = "runs"
    id = Column(Integer, primary_key=True, index=True)
    command = Column(String, index=True)
    system = Column(String, index=True, nullable=True)
    status = Column(Enum(RunStatus), default=RunStatus.PENDING)
    config_hash = Column(String, nullable=True)
    aggregate = Column(String, nullable=True)
    wall_time = Column(Float, nullable=True)
    started_at = Column(DateTime(timezone=True), server_default=func.now())
    completed_at = Column(DateTime(timezone=True), nullable=True)
    error_message = Column(Text, nullable=True)
