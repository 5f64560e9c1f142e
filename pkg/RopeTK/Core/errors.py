"""
# Error Library

* Description:

    Exception hierarchy shared by every RopeTK sub-package. The CLI maps
    these onto process exit codes, see ``RopeTK.Core.enums.ExitCode``.
"""


class RopeError(Exception):
    """Root of all toolkit errors."""


class RopeValueError(RopeError, ValueError):
    """An argument or precondition was violated by the caller."""


class PointBehindCameraError(RopeValueError):
    """
    A point transformed into the camera frame has non-positive depth.

    Args:
        index (int): Position of the offending point in the input.
        depth (float): Its camera-frame depth in millimetres.
    """

    def __init__(self, index: int, depth: float) -> None:
        super().__init__(f"Point {index} is behind the camera (z={depth:.6g} mm).")
        self.index = index
        self.depth = depth


class DataError(RopeError):
    """A file or dataset record is missing, malformed or inconsistent."""


class NumericalError(RopeError, ArithmeticError):
    """A numerical routine produced non-finite values or failed to converge."""
