from __future__ import annotations

import logging
from logging import Logger

LOGGER_NAME = "fcplan"


class CliLogger(Logger):
    def __init__(self, name: str = LOGGER_NAME, level: int = logging.NOTSET) -> None:
        super().__init__(name, level)
        # Without handlers Logger falls back to stderr for WARNING+; keep silent
        self.addHandler(logging.NullHandler())
