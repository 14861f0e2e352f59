import logging
import sys
from typing import Optional

from injector import Binder, Injector, InstanceProvider, Module, provider, singleton

from forecast_planner.utils.log_formatter import ColoredFormatter
from forecast_planner.utils.log_handlers import LOGGER_NAME, CliLogger

INFO_FORMAT = "%(asctime)s [%(levelname)s] %(message)s"
# Debug lines name their source module so planner and suite output can be told apart
DEBUG_FORMAT = "%(asctime)s [%(levelname)s] %(module)s: %(message)s"


def console_level(verbose: bool, debug: bool) -> Optional[int]:
    """Console level for the given flags; None leaves stderr quiet."""
    if debug:
        return logging.DEBUG
    if verbose:
        return logging.INFO
    return None


class LoggingModule(Module):
    """Provides the shared CliLogger and owns its single stderr handler."""

    def __init__(self) -> None:
        self._console_handler: Optional[logging.Handler] = None

    def configure(self, binder: Binder) -> None:
        binder.bind(LoggingModule, to=InstanceProvider(self))

    @singleton
    @provider
    def provide_logger(self) -> CliLogger:
        return CliLogger(LOGGER_NAME, level=logging.INFO)

    def attach_console(self, logger: CliLogger, level: int) -> None:
        # Group and command flags may both fire; the later call replaces the handler
        if self._console_handler is not None:
            logger.removeHandler(self._console_handler)

        handler = logging.StreamHandler(sys.stderr)
        fmt = DEBUG_FORMAT if level <= logging.DEBUG else INFO_FORMAT
        handler.setFormatter(ColoredFormatter(fmt, use_color=sys.stderr.isatty()))
        handler.setLevel(level)
        logger.addHandler(handler)
        logger.setLevel(min(logger.level, level))
        self._console_handler = handler

    @staticmethod
    def configure_console_logging(
        injector: Injector,
        verbose: bool = False,
        debug: bool = False,
        logger: Optional[CliLogger] = None,
    ) -> None:
        level = console_level(verbose, debug)
        if level is None:
            return
        injector.get(LoggingModule).attach_console(
            logger or injector.get(CliLogger), level
        )
