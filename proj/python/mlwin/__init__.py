"""Low-latency windows, minimum-phase transforms and time-frequency analysis."""

from ._core import *  # noqa: F401,F403
from ._core import MlwinError, Window

__all__ = [name for name in dir() if not name.startswith("_")]
