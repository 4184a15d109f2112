import pytest
from loguru import logger

from entrograph.core.config import settings
from entrograph.services.orbit_service import OrbitService


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Keep ledger and log files out of the working tree; restore mutated settings."""
    monkeypatch.setattr(settings, "record_runs", False)
    monkeypatch.setattr(settings, "database_url", f"sqlite:///{tmp_path / 'runs.db'}")
    monkeypatch.setattr(settings, "log_dir", str(tmp_path / "logs"))
    for name in ("seed", "threads", "linear_band", "tail_fraction", "randomized_order_pass"):
        monkeypatch.setattr(settings, name, getattr(settings, name))
    yield
    OrbitService.clear()
    # sinks added by the CLI point at captured streams and the tmp log dir
    logger.remove()
