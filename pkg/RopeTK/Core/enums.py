"""
# RopeTK Enum Library

* Description:

    All enums used by the pose toolkit.
"""

import enum


class PrecisionLevel(enum.Enum):
    """Heatmap precision heads and the Gaussian spread of their targets."""

    Low = "low"
    Medium = "medium"
    High = "high"

    @property
    def sigma(self) -> float:
        return _SIGMAS[self]


_SIGMAS = {
    PrecisionLevel.Low: 8.0,
    PrecisionLevel.Medium: 3.0,
    PrecisionLevel.High: 1.5,
}


class DistanceKind(str, enum.Enum):
    ADD = "ADD"
    ADDS = "ADD-S"


class ExitCode(enum.IntEnum):
    Success = 0
    Usage = 1
    Data = 2
    Numerical = 3
