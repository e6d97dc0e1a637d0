import os
import time
import logging
from dataclasses import dataclass
from typing import Optional
from dotenv import load_dotenv

load_dotenv()
logger = logging.getLogger(__name__)

LOG_LEVEL = os.getenv('REACH_LOG_LEVEL', 'INFO')


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == '':
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


def _env_float(name: str) -> Optional[float]:
    raw = os.getenv(name)
    if raw is None or raw == '':
        return None
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"{name} must be a number of seconds, got {raw!r}")


class CapExceeded(RuntimeError):
    """Raised when a search runs out of its explored-state or time budget."""

    def __init__(self, resource: str, limit):
        super().__init__(f"{resource} cap of {limit} exceeded")
        self.resource = resource
        self.limit = limit


@dataclass(frozen=True)
class Caps:
    """Resource limits shared by the closure, the product searches and the oracle."""

    max_frontiers: int = 1_000_000
    max_search_states: int = 2_000_000
    time_limit: Optional[float] = None
    oracle_max_words: int = 200_000

    @classmethod
    def from_env(cls) -> 'Caps':
        return cls(
            max_frontiers=_env_int('REACH_MAX_FRONTIERS', 1_000_000),
            max_search_states=_env_int('REACH_MAX_SEARCH_STATES', 2_000_000),
            time_limit=_env_float('REACH_TIME_LIMIT'),
            oracle_max_words=_env_int('REACH_ORACLE_MAX_WORDS', 200_000),
        )


class Budget:
    """Mutable work counter over a Caps value; one per top-level call."""

    def __init__(self, caps: Optional[Caps] = None):
        self.caps = caps or Caps.from_env()
        self.frontiers = 0
        self._started = time.monotonic()

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self._started

    def charge_frontier(self, count: int = 1):
        self.frontiers += count
        if self.frontiers > self.caps.max_frontiers:
            logger.warning(f"Frontier budget exhausted after {self.frontiers} entries")
            raise CapExceeded('frontier', self.caps.max_frontiers)
        self.check_time()

    def check_time(self):
        limit = self.caps.time_limit
        if limit is not None and self.elapsed > limit:
            logger.warning(f"Time budget exhausted after {self.elapsed:.1f}s")
            raise CapExceeded('time', limit)

    def check_states(self, states: int):
        if states > self.caps.max_search_states:
            logger.warning(f"Search state budget exhausted ({states} states)")
            raise CapExceeded('search state', self.caps.max_search_states)
        if states % 4096 == 0:
            self.check_time()
