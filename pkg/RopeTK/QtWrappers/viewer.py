"""
# Scene Viewer

* Descriptions

    Inspector window for one dataset scene: the rendered image with the
    groundtruth, decoded and reprojected landmarks circled, the three
    heatmap heads side by side, and the scene and prediction records as
    collapsible trees.

* Colours

    green  - groundtruth landmarks
    red    - decoded high-precision landmarks
    cyan   - model landmarks reprojected with the predicted pose
"""

import logging
from typing import Optional

import numpy as np
from PySide6 import QtCore
from PySide6 import QtGui
from PySide6 import QtWidgets

from RopeTK.Augment.image import image_to_qimage
from RopeTK.Augment.image import read_png
from RopeTK.Core.enums import PrecisionLevel
from RopeTK.Core.errors import DataError
from RopeTK.Core.errors import RopeValueError
from RopeTK.Core.types_ import FLOAT_ARRAY
from RopeTK.Geometry.cloud import landmark_array
from RopeTK.Geometry.pose import project
from RopeTK.Metrics.evaluate import PredictionRecord
from RopeTK.QtWrappers.app import exec_window
from RopeTK.QtWrappers.app import init_application
from RopeTK.QtWrappers.heatmap_view import draw_markers
from RopeTK.QtWrappers.heatmap_view import HeatmapView
from RopeTK.QtWrappers.report_view import ReportView
from RopeTK.Synth.manifest import Manifest
from RopeTK.Synth.manifest import SceneEntry


logger = logging.getLogger(__name__)

GT_COLOUR = QtGui.QColor(40, 220, 40)
DECODED_COLOUR = QtGui.QColor(230, 40, 40)
REPROJECTED_COLOUR = QtGui.QColor(40, 200, 230)


def find_prediction(predictions: list[PredictionRecord], image_id: str) -> Optional[PredictionRecord]:
    for record in predictions:
        if record.image_id == image_id:
            return record
    return None


def reprojected_landmarks(manifest: Manifest, entry: SceneEntry,
                          record: Optional[PredictionRecord]) -> Optional[FLOAT_ARRAY]:
    """Model landmarks projected with the predicted pose, or None."""
    if record is None or record.pose is None:
        return None
    model = landmark_array(list(manifest.objects[entry.object_id].landmarks))
    try:
        return project(model, record.pose, entry.intrinsics)
    except RopeValueError:
        # a landmark behind the camera has no pixel position
        return None


class SceneViewer(QtWidgets.QMainWindow):
    """Main window inspecting one scene and, optionally, its prediction.

    Args:
        manifest (Manifest): The loaded dataset.
        entry (SceneEntry): The scene to show.
        prediction (Optional[PredictionRecord]): The pipeline output for
            this scene, if any.
        scale (int): Zoom for image and heatmaps.
    """

    def __init__(self, manifest: Manifest, entry: SceneEntry,
                 prediction: Optional[PredictionRecord] = None, scale: int = 3) -> None:
        super().__init__()
        self.manifest = manifest
        self.entry = entry
        self.prediction = prediction
        self._scale = scale
        self.setWindowTitle(f'RopeTK - scene {entry.image_id}')

        self._widget_main = QtWidgets.QWidget()
        self._layout_main = QtWidgets.QHBoxLayout(self._widget_main)
        self.setCentralWidget(self._widget_main)

        self._create_widgets()
        self._create_layout()
        self._create_connections()
        self._load()

    def _create_widgets(self) -> None:
        self.image_label = QtWidgets.QLabel()
        self.image_label.setAlignment(QtCore.Qt.AlignmentFlag.AlignCenter)

        self.heatmap_views = {
            level: HeatmapView(f'{level.value} (sigma {level.sigma:g})', self._scale)
            for level in PrecisionLevel
        }

        self.cb_corrupted = QtWidgets.QCheckBox('Corrupted heatmaps')
        self.cb_corrupted.setChecked(bool(self.entry.corrupted_heatmap_paths))
        self.cb_corrupted.setEnabled(bool(self.entry.corrupted_heatmap_paths))

        n_channels = len(self.entry.gt_landmarks)
        self.sb_channel = QtWidgets.QSpinBox()
        self.sb_channel.setRange(-1, max(n_channels - 1, -1))
        self.sb_channel.setSpecialValueText('all')
        self.sb_channel.setValue(-1)

        report: dict = {'scene': self.entry.to_dict()}
        if self.prediction is not None:
            report['prediction'] = self.prediction.to_dict()
        self.report_view = ReportView(report)

    def _create_layout(self) -> None:
        left = QtWidgets.QVBoxLayout()
        left.addWidget(self.image_label)

        controls = QtWidgets.QHBoxLayout()
        controls.addWidget(QtWidgets.QLabel('Channel'))
        controls.addWidget(self.sb_channel)
        controls.addWidget(self.cb_corrupted)
        controls.addStretch()
        left.addLayout(controls)

        heads = QtWidgets.QHBoxLayout()
        for view in self.heatmap_views.values():
            heads.addWidget(view)
        left.addLayout(heads)

        self._layout_main.addLayout(left)
        self._layout_main.addWidget(self.report_view)

    def _create_connections(self) -> None:
        self.sb_channel.valueChanged.connect(self._on_channel_changed)
        self.cb_corrupted.toggled.connect(self._load_heatmaps)

    # ----------Public API-----------------------------------------------------

    @property
    def current_channel(self) -> Optional[int]:
        value = self.sb_channel.value()
        return None if value < 0 else value

    # ----------Internals------------------------------------------------------

    def _markers(self) -> list[tuple[FLOAT_ARRAY, QtGui.QColor]]:
        markers = [(np.asarray(self.entry.gt_landmarks, dtype=np.float64), GT_COLOUR)]
        if self.prediction is not None and self.prediction.landmarks_high is not None:
            markers.append((self.prediction.landmarks_high, DECODED_COLOUR))
        reprojected = reprojected_landmarks(self.manifest, self.entry, self.prediction)
        if reprojected is not None:
            markers.append((reprojected, REPROJECTED_COLOUR))
        return markers

    def _load(self) -> None:
        self._load_image()
        self._load_heatmaps()

    def _load_image(self) -> None:
        try:
            image = read_png(self.manifest.root / self.entry.image_path)
        except DataError as err:
            logger.warning('[SceneViewer] %s', err)
            self.image_label.setText('image unavailable')
            return

        qimage = image_to_qimage(image).scaled(
            image.width * self._scale, image.height * self._scale,
            QtCore.Qt.AspectRatioMode.IgnoreAspectRatio,
            QtCore.Qt.TransformationMode.FastTransformation,
        )
        for points, colour in self._markers():
            qimage = draw_markers(qimage, points, colour, self._scale)
        self.image_label.setPixmap(QtGui.QPixmap.fromImage(qimage))

    def _load_heatmaps(self) -> None:
        try:
            stacks = self.manifest.load_heatmaps(self.entry, corrupted=self.cb_corrupted.isChecked())
        except DataError as err:
            logger.warning('[SceneViewer] %s', err)
            stacks = {}

        markers = self._markers()
        for level, view in self.heatmap_views.items():
            view.set_markers(markers)
            view.set_stack(stacks.get(level), self.current_channel)

    def _on_channel_changed(self, _value: int) -> None:
        for view in self.heatmap_views.values():
            view.set_channel(self.current_channel)


def run_viewer(manifest: Manifest, entry: SceneEntry,
               predictions: Optional[list[PredictionRecord]] = None) -> int:
    """Open a SceneViewer on ``entry`` and block until it is closed."""
    app = init_application()
    prediction = find_prediction(predictions or [], entry.image_id)
    if predictions and prediction is None:
        logger.warning('No prediction for scene %s', entry.image_id)
    window = SceneViewer(manifest, entry, prediction)
    return exec_window(window, app)
