"""命令行：simulate / detect / monitor / attack / scan / report / victim"""

from .main import build_parser, main
from .report import write_report

__all__ = ["build_parser", "main", "write_report"]
