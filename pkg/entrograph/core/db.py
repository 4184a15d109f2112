from typing import Iterator, Optional

from sqlalchemy import create_engine
from sqlalchemy.orm import DeclarativeBase, Session, sessionmaker

from entrograph.core.config import settings


class Base(DeclarativeBase):
    pass


class Database:
    def __init__(self, url: Optional[str] = None):
        self.engine = create_engine(
            url or settings.database_url,
            echo=settings.echo_db_queries,
            future=True,
        )
        self.session_factory = sessionmaker(self.engine, expire_on_commit=False)

    def create_all(self) -> None:
        Base.metadata.create_all(self.engine)


def get_session(database: Database) -> Iterator[Session]:
    with database.session_factory() as session:
        yield session
