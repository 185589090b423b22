"""
App - Settings and logging bootstrap for snfdist
Environment-driven configuration shared by every module
"""

import os
import logging
from dataclasses import dataclass

import psutil
from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

MIN_PRECISION = 128


@dataclass(frozen=True)
class Settings:
    """Runtime settings read from the environment"""
    threads: int
    enum_budget: int
    minor_budget: int
    precision: int
    log_level: str
    prime_cutoff: int
    sample_k: int
    sample_trials: int
    shard_size: int


def _env_int(name: str, default: int, minimum: int = 1) -> int:
    """Read a positive integer environment variable"""
    raw = os.environ.get(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def load_settings() -> Settings:
    """Build settings from environment variables with defaults"""
    cpu_count = psutil.cpu_count(logical=True) or 1
    level = os.environ.get('SNFDIST_LOG_LEVEL', 'INFO').upper()
    if level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
        raise ValueError(f"SNFDIST_LOG_LEVEL must be a logging level name, got {level!r}")

    return Settings(
        threads=_env_int('SNFDIST_THREADS', cpu_count),
        enum_budget=_env_int('SNFDIST_ENUM_BUDGET', 1 << 22),
        minor_budget=_env_int('SNFDIST_MINOR_BUDGET', 10**6),
        precision=_env_int('SNFDIST_PRECISION', 192, minimum=MIN_PRECISION),
        log_level=level,
        prime_cutoff=_env_int('SNFDIST_PRIME_CUTOFF', 1000, minimum=10),
        sample_k=_env_int('SNFDIST_SAMPLE_K', 10**6),
        sample_trials=_env_int('SNFDIST_SAMPLE_TRIALS', 10**5),
        shard_size=_env_int('SNFDIST_SHARD_SIZE', 4096),
    )


def configure_logging(level: str = None):
    """Configure root logging for command-line runs"""
    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper(), logging.INFO),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s'
    )


settings = load_settings()
