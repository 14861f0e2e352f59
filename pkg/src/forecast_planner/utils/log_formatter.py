import logging
from logging import LogRecord

import colorama
from colorama import Fore, Style

colorama.init()

LEVEL_COLORS = {
    logging.DEBUG: Fore.BLUE,
    logging.INFO: Fore.GREEN,
    logging.WARNING: Fore.YELLOW,
    logging.ERROR: Fore.RED,
    logging.CRITICAL: Fore.RED + Style.BRIGHT,
}


class ColoredFormatter(logging.Formatter):
    """Colors the ``[LEVEL]`` tag and the message that follows it."""

    def __init__(self, fmt: str, use_color: bool = True) -> None:
        super().__init__(fmt)
        self.use_color = use_color

    def format(self, record: LogRecord) -> str:
        line = super().format(record)
        color = LEVEL_COLORS.get(record.levelno)
        if not self.use_color or color is None:
            return line

        tag = f"[{record.levelname}]"
        prefix, found, rest = line.partition(tag)
        if not found:
            return f"{color}{line}{Style.RESET_ALL}"
        return f"{prefix}{color}{tag}{Style.RESET_ALL}{color}{rest}{Style.RESET_ALL}"
