from RopeTK.QtWrappers.app import exec_window
from RopeTK.QtWrappers.app import init_application
from RopeTK.QtWrappers.heatmap_view import draw_markers
from RopeTK.QtWrappers.heatmap_view import heat_colours
from RopeTK.QtWrappers.heatmap_view import HeatmapView
from RopeTK.QtWrappers.report_view import ReportView
from RopeTK.QtWrappers.viewer import run_viewer
from RopeTK.QtWrappers.viewer import SceneViewer
