"""
# Heatmap View

* Descriptions

    A labelled widget showing one heatmap channel (or the max over all
    channels) in a heat colour map, with optional landmark markers drawn
    on top.
"""

from typing import Optional

import numpy as np
import PySide6.QtCore as QtCore
import PySide6.QtGui as QtGui
import PySide6.QtWidgets as QtWidgets

from RopeTK.Augment.image import ImageBuffer
from RopeTK.Augment.image import image_to_qimage
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Heatmaps.stack import HeatmapStack


def heat_colours(values: FLOAT_ARRAY) -> ImageBuffer:
    """Map a 2D array onto black-red-yellow-white, scaled by its maximum."""
    peak = float(values.max())
    x = values / peak if peak > 0 else np.zeros_like(values)
    rgb = np.stack(
        [np.clip(3.0 * x, 0, 1), np.clip(3.0 * x - 1.0, 0, 1), np.clip(3.0 * x - 2.0, 0, 1)],
        axis=-1,
    )
    return ImageBuffer((255.0 * rgb).round().astype(np.uint8))


def draw_markers(image: QtGui.QImage, points: FLOAT_ARRAY, colour: QtGui.QColor,
                 scale: float = 1.0, radius: float = 3.0) -> QtGui.QImage:
    """Return a copy of ``image`` with a circle around every ``(x, y)`` point."""
    out = image.convertToFormat(QtGui.QImage.Format.Format_RGB32)
    painter = QtGui.QPainter(out)
    try:
        painter.setRenderHint(QtGui.QPainter.RenderHint.Antialiasing)
        painter.setPen(QtGui.QPen(colour, 1.0))
        for x, y in np.asarray(points, dtype=np.float64).reshape(-1, 2):
            # pixel centres sit at +0.5 in Qt's continuous coordinates
            centre = QtCore.QPointF((x + 0.5) * scale, (y + 0.5) * scale)
            painter.drawEllipse(centre, radius, radius)
    finally:
        painter.end()
    return out


class HeatmapView(QtWidgets.QWidget):
    """Preview of a single heatmap stack.

    Args:
        label: Caption shown above the image.
        scale: Integer zoom applied to the heatmap pixels.
    """

    def __init__(self, label: str, scale: int = 3) -> None:
        super().__init__()
        self._scale = scale
        self._stack: Optional[HeatmapStack] = None
        self._channel: Optional[int] = None
        self._markers: list[tuple[FLOAT_ARRAY, QtGui.QColor]] = []
        self.current_image = QtGui.QImage()

        self._layout = QtWidgets.QVBoxLayout(self)
        self._layout.setContentsMargins(0, 0, 0, 0)
        self._label = QtWidgets.QLabel(label)
        self._label.setAlignment(QtCore.Qt.AlignmentFlag.AlignCenter)
        self._image = QtWidgets.QLabel()
        self._image.setAlignment(QtCore.Qt.AlignmentFlag.AlignCenter)
        self._layout.addWidget(self._label)
        self._layout.addWidget(self._image)

    # ----------Public API-----------------------------------------------------

    @property
    def channel(self) -> Optional[int]:
        return self._channel

    def set_stack(self, stack: Optional[HeatmapStack], channel: Optional[int] = None) -> None:
        """Show ``stack``; ``channel=None`` shows the max over channels."""
        self._stack = stack
        self._channel = channel
        self._redraw()

    def set_channel(self, channel: Optional[int]) -> None:
        self._channel = channel
        self._redraw()

    def set_markers(self, markers: list[tuple[FLOAT_ARRAY, QtGui.QColor]]) -> None:
        """Landmark sets to circle, each with its own colour."""
        self._markers = list(markers)
        self._redraw()

    # ----------Internals------------------------------------------------------

    def _redraw(self) -> None:
        if self._stack is None:
            self.current_image = QtGui.QImage()
            self._image.clear()
            return

        if self._channel is None:
            values = self._stack.values.max(axis=0)
        else:
            values = self._stack.values[self._channel]
        zoomed = np.kron(values, np.ones((self._scale, self._scale)))
        image = image_to_qimage(heat_colours(zoomed))

        for points, colour in self._markers:
            if self._channel is not None:
                points = np.asarray(points).reshape(-1, 2)[self._channel:self._channel + 1]
            image = draw_markers(image, points, colour, self._scale)

        self.current_image = image
        self._image.setPixmap(QtGui.QPixmap.fromImage(image))
