"""
# Report View

* Description:

    A read-only tree that displays keys and values of a dictionary,
    recursively expanding nested mappings and sequences. Used to show
    scene records, predictions and evaluation summaries.
"""

from collections.abc import Mapping
from collections.abc import Sequence
from typing import Any
from typing import Optional

from PySide6 import QtWidgets


MAX_SEQUENCE_ROWS = 64


class ReportView(QtWidgets.QTreeWidget):
    """Collapsible key/value tree for nested report dictionaries.

    Example:
        >>> view = ReportView({'image_id': '000003', 'valid': True})
        >>> view.topLevelItemCount()
        2

    Args:
        data (Mapping): The dictionary to display.
        expand_depth (int): Levels expanded after a refresh.

    Notes:
        - Sequences longer than ``MAX_SEQUENCE_ROWS`` are truncated with a
          trailing ``...`` row.
        - Short sequences of numbers are shown inline on their key's row.
    """

    def __init__(self, data: Optional[Mapping] = None, expand_depth: int = 1) -> None:
        super().__init__()
        self.setColumnCount(2)
        self.setHeaderLabels(['Key', 'Value'])
        self.setMinimumWidth(250)
        self.expand_depth = expand_depth
        self.data: Mapping = data or {}
        self.refresh()

    def set_data(self, data: Mapping) -> None:
        self.data = data
        self.refresh()

    def refresh(self) -> None:
        """Rebuild the tree from self.data."""
        self.clear()
        for key, value in self.data.items():
            self.addTopLevelItem(self._make_item(str(key), value))
        self.expandToDepth(self.expand_depth - 1)

    def _make_item(self, label: str, value: Any) -> QtWidgets.QTreeWidgetItem:
        """Recursive builder; mappings and long sequences become child rows."""
        item = QtWidgets.QTreeWidgetItem([label, ''])
        if isinstance(value, Mapping):
            for k, v in value.items():
                item.addChild(self._make_item(str(k), v))
        elif not isinstance(value, (str, bytes, bytearray)) and isinstance(value, Sequence):
            if _is_short_vector(value):
                item.setText(1, ', '.join(_fmt(v) for v in value))
                return item
            for i, v in enumerate(value[:MAX_SEQUENCE_ROWS]):
                item.addChild(self._make_item(str(i), v))
            if len(value) > MAX_SEQUENCE_ROWS:
                item.addChild(QtWidgets.QTreeWidgetItem(['...', f'{len(value)} items']))
        else:
            item.setText(1, _fmt(value))
        return item


def _is_short_vector(value: Sequence) -> bool:
    return len(value) <= 12 and all(isinstance(v, (int, float)) for v in value)


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f'{value:.6g}'
    return str(value)
