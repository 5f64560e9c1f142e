from pathlib import Path


MODULE_NAME = Path(__file__).parent.name

__version__ = "0.4.0"
