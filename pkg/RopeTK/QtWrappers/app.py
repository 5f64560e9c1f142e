"""
# Application

* Description

    QApplication helpers for the inspector windows.
"""

import sys
from typing import Optional

from PySide6 import QtCore
from PySide6 import QtWidgets

import RopeTK


def init_application(app_name: str = RopeTK.MODULE_NAME,
                     org: str = RopeTK.MODULE_NAME) -> QtWidgets.QApplication:
    """Return the running QApplication, creating it on first use.

    Args:
        app_name (str): Application name (used by QSettings, paths).
        org (str): Organization name (used by QSettings).

    Returns:
        QtWidgets.QApplication: The process-wide application (not executed).
    """
    app = QtWidgets.QApplication.instance()
    if app is not None:
        return app

    QtCore.QCoreApplication.setOrganizationName(org)
    QtCore.QCoreApplication.setApplicationName(app_name)
    return QtWidgets.QApplication(sys.argv[:1])


def exec_window(window: QtWidgets.QMainWindow,
                app: Optional[QtWidgets.QApplication] = None) -> int:
    """Show a constructed window and block in the event loop.

    Returns:
        int: The Qt exit code.
    """
    app = app or init_application()
    window.show()
    return app.exec()
