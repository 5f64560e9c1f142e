"""
# Image Buffers

* Description:

    8-bit RGB image buffers, object bounding boxes, and PNG input/output
    through ``QtGui.QImage``.

* Notes:

    ``QImage`` does not need a running ``QApplication`` to encode or
    decode PNG, so these helpers are safe to call from the CLI.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PySide6 import QtGui

from RopeTK.Core.errors import DataError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.types_ import UINT8_ARRAY


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ImageBuffer(object):
    """
    An RGB image as an ``(H, W, 3)`` uint8 array, row-major.

    Args:
        pixels (UINT8_ARRAY): The pixel data; copied and made read-only.
    """

    pixels: UINT8_ARRAY

    def __post_init__(self) -> None:
        pixels = np.array(self.pixels, dtype=np.uint8)
        if pixels.ndim != 3 or pixels.shape[2] != 3 or min(pixels.shape[:2]) < 1:
            raise RopeValueError(f"Image must be (H, W, 3) with H, W >= 1, got {pixels.shape}.")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def blank(cls, width: int, height: int, value: int = 0) -> ImageBuffer:
        return cls(np.full((height, width, 3), value, dtype=np.uint8))


@dataclass(frozen=True)
class BBox(object):
    """
    Inclusive-exclusive pixel box ``[x0, x1) x [y0, y1)``.

    Args:
        x0 (int): Left column.
        y0 (int): Top row.
        x1 (int): One past the right column.
        y1 (int): One past the bottom row.
    """

    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    def validate_for(self, width: int, height: int) -> None:
        """
        Raises:
            RopeValueError: If the box is empty or not inside a ``width x height`` image.
        """
        if not (0 <= self.x0 < self.x1 <= width and 0 <= self.y0 < self.y1 <= height):
            raise RopeValueError(f"{self} does not fit a {width}x{height} image.")

    def to_list(self) -> list[int]:
        return [self.x0, self.y0, self.x1, self.y1]

    @classmethod
    def from_list(cls, values: list[int]) -> BBox:
        x0, y0, x1, y1 = (int(v) for v in values)
        return cls(x0, y0, x1, y1)

    @classmethod
    def around(cls, points: np.ndarray, pad: float, width: int, height: int) -> BBox:
        """
        Tight box around ``(N, 2)`` pixel points, padded by ``pad`` of its
        size on every side and clipped to the image.
        """
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        extent = np.maximum(hi - lo, 1.0)
        lo = lo - pad * extent
        hi = hi + pad * extent
        x0 = int(np.clip(np.floor(lo[0]), 0, width - 1))
        y0 = int(np.clip(np.floor(lo[1]), 0, height - 1))
        x1 = int(np.clip(np.ceil(hi[0]) + 1, x0 + 1, width))
        y1 = int(np.clip(np.ceil(hi[1]) + 1, y0 + 1, height))
        return cls(x0, y0, x1, y1)


def image_to_qimage(image: ImageBuffer) -> QtGui.QImage:
    """Copy an ``ImageBuffer`` into a self-owned ``QImage`` (RGB888)."""
    data = np.ascontiguousarray(image.pixels).tobytes()
    qimage = QtGui.QImage(
        data, image.width, image.height, 3 * image.width, QtGui.QImage.Format.Format_RGB888
    )
    # detach from the temporary python buffer
    return qimage.copy()


def qimage_to_image(qimage: QtGui.QImage) -> ImageBuffer:
    """Copy any ``QImage`` into an ``ImageBuffer``, converting to RGB888."""
    rgb = qimage.convertToFormat(QtGui.QImage.Format.Format_RGB888)
    width, height = rgb.width(), rgb.height()
    stride = rgb.bytesPerLine()
    raw = np.frombuffer(bytes(rgb.constBits()), dtype=np.uint8, count=stride * height)
    pixels = raw.reshape(height, stride)[:, : 3 * width].reshape(height, width, 3)
    return ImageBuffer(pixels)


def read_png(path: Path) -> ImageBuffer:
    """
    Load an image file as 8-bit RGB.

    Raises:
        DataError: If the file cannot be read or decoded.
    """
    path = Path(path)
    qimage = QtGui.QImage(path.as_posix())
    if qimage.isNull():
        raise DataError(f"Cannot read image {path}.")
    return qimage_to_image(qimage)


def write_png(path: Path, image: ImageBuffer) -> None:
    """
    Save ``image`` as an 8-bit RGB PNG.

    Raises:
        DataError: If Qt fails to write the file.
    """
    path = Path(path)
    if not image_to_qimage(image).save(path.as_posix(), "PNG"):
        raise DataError(f"Cannot write PNG {path}.")
    logger.debug("Wrote %dx%d PNG to %s", image.width, image.height, path)
