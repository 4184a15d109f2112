from pydantic_settings import BaseSettings
from typing import Tuple


class Settings(BaseSettings):
    app_name: str = "Entrograph"
    version: str = "1.0.0"

    # Run ledger
    database_url: str = "sqlite:///./entrograph.db"
    echo_db_queries: bool = False
    record_runs: bool = True

    # Execution
    threads: int = 1
    log_level: str = "INFO"
    log_dir: str = "logs"

    # Growth classification
    tail_fraction: float = 0.5
    linear_band: Tuple[float, float] = (0.75, 1.25)
    bounded_band_high: float = 0.25
    exponential_threshold: float = 0.1
    clamp_monotone: bool = False

    # Counting
    seed: int = 0
    randomized_order_pass: bool = False
    generator_sample_cap: int = 2048

    # Coding
    max_words_per_orbit: int = 4096

    # Sampling
    ladder_density: int = 16
    ladder_horizon: int = 512
    double_arrow_grid_level: int = 8
    double_arrow_exact_bits: int = 256
    ring_radius: float = 64.0

    class Config:
        env_file = ".env"
        env_prefix = "ENTROGRAPH_"


settings = Settings()
