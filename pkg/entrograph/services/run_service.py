from datetime import datetime
from typing import List, Optional

from sqlalchemy import select
from sqlalchemy.orm import Session

from entrograph.models import RunRecord, RunStatus
from entrograph.schemas.run import RunCreate, RunRead


class RunService:
    @classmethod
    def create_run(cls, session: Session, run: RunCreate) -> RunRead:
        db_run = RunRecord(**run.model_dump(), status=RunStatus.RUNNING)
        session.add(db_run)
        session.commit()
        session.refresh(db_run)
        return RunRead.model_validate(db_run)

    @classmethod
    def finish_run(
        cls,
        session: Session,
        run_id: int,
        aggregate: Optional[str] = None,
        wall_time: Optional[float] = None,
    ) -> Optional[RunRead]:
        run = session.get(RunRecord, run_id)
        if run is None:
            return None
        run.status = RunStatus.COMPLETED
        run.aggregate = aggregate
        run.wall_time = wall_time
        run.completed_at = datetime.utcnow()
        session.commit()
        return RunRead.model_validate(run)

    @classmethod
    def fail_run(cls, session: Session, run_id: int, error: str) -> Optional[RunRead]:
        run = session.get(RunRecord, run_id)
        if run is None:
            return None
        run.status = RunStatus.FAILED
        run.error_message = error
        run.completed_at = datetime.utcnow()
        session.commit()
        return RunRead.model_validate(run)

    @classmethod
    def recent_runs(cls, session: Session, limit: int = 10) -> List[RunRead]:
        result = session.execute(select(RunRecord).order_by(RunRecord.id.desc()).limit(limit))
        return [RunRead.model_validate(run) for run in result.scalars().all()]
