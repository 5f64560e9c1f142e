"""
# RHMP Heatmap Files

* Description:

    Bit-exact binary container for heatmap stacks:

        magic   4 bytes  b"RHMP"
        version u8       1
        K, H, W u32 x 3  little-endian
        values  K*H*W    IEEE-754 float32 little-endian, channel-major, row-major
        flag    u8       1 if normalized else 0
"""

import logging
import struct
from pathlib import Path

import numpy as np

from RopeTK.Core.errors import DataError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Heatmaps.stack import HeatmapStack
from RopeTK.Heatmaps.stack import NORMALIZED_TOL


logger = logging.getLogger(__name__)

MAGIC = b"RHMP"
VERSION = 1
_HEADER = struct.Struct("<4sBIII")


def encode(stack: HeatmapStack) -> bytes:
    """Serialize ``stack`` into RHMP bytes (values stored as float32)."""
    k, h, w = stack.values.shape
    header = _HEADER.pack(MAGIC, VERSION, k, h, w)
    body = stack.values.astype("<f4").tobytes(order="C")
    return header + body + struct.pack("<B", 1 if stack.normalized else 0)


def decode(data: bytes) -> HeatmapStack:
    """
    Parse RHMP bytes.

    Raises:
        DataError: On bad magic, unsupported version or a size mismatch.
    """
    if len(data) < _HEADER.size + 1:
        raise DataError("RHMP payload is truncated.")
    magic, version, k, h, w = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise DataError(f"Bad RHMP magic {magic!r}.")
    if version != VERSION:
        raise DataError(f"Unsupported RHMP version {version}.")
    count = k * h * w
    expected = _HEADER.size + 4 * count + 1
    if len(data) != expected:
        raise DataError(f"RHMP size mismatch: expected {expected} bytes, got {len(data)}.")

    values = np.frombuffer(data, dtype="<f4", count=count, offset=_HEADER.size)
    values = values.astype(np.float64).reshape(k, h, w)
    normalized = data[-1] == 1
    if normalized:
        # float32 storage perturbs the sums by ~1e-7; re-check against the stack tolerance
        sums = values.reshape(k, -1).sum(axis=1)
        if np.any(np.abs(sums - 1.0) > NORMALIZED_TOL):
            raise DataError("RHMP flagged normalized but channel sums drifted.")
    try:
        return HeatmapStack(values, normalized=normalized)
    except RopeValueError as err:
        raise DataError(f"Invalid RHMP contents: {err}") from err


def save_stack(path: Path, stack: HeatmapStack) -> None:
    Path(path).write_bytes(encode(stack))
    logger.debug("Wrote %s channels to %s", stack.channels, path)


def load_stack(path: Path) -> HeatmapStack:
    """
    Read an RHMP file.

    Raises:
        DataError: If the file is missing or malformed.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as err:
        raise DataError(f"Cannot read heatmap file {path}: {err!r}") from err
    return decode(data)
