import importlib
import inspect
from pathlib import Path
from typing import Any, Dict, Optional, TypedDict

import click
from injector import Injector

from forecast_planner.modules.logging import LoggingModule
from forecast_planner.utils.constants import CLI_VERSION
from forecast_planner.utils.log_handlers import CliLogger

COMMAND_FILE = "command.py"
COMMAND_PACKAGE = "forecast_planner.commands"
IGNORE_PREFIX = "_"
COMMAND_ATTR = "execute"
NAME_ATTR = "name"


class CliContext(TypedDict):
    injector: Injector
    verbose: bool
    debug: bool


class CommandRegistry:
    """Registry with automatic command discovery."""

    def __init__(self, injector: Injector, logger: CliLogger):
        self.injector = injector
        self.logger = logger
        self.commands: Dict[str, click.Command] = {}

    def discover_commands(self, commands_dir: Optional[str] = None) -> None:
        """
        Automatically discover and register CLI commands.

        Every ``commands/<name>/command.py`` is imported as
        ``forecast_planner.commands.<name>.command`` and each class decorated
        with ``@command`` is registered under its click name, e.g.
        ``commands/suite/command.py`` with ``@command("suite")`` becomes
        ``fcplan suite``.

        Args:
            commands_dir: Optional custom path for commands directory
        """
        if commands_dir is None:
            commands_dir = str(Path(__file__).parent.parent / "commands")

        base_path = Path(commands_dir)
        if not base_path.exists():
            self.logger.error(f"Commands directory not found: {base_path}")
            return

        for command_file in sorted(base_path.glob(f"**/{COMMAND_FILE}")):
            relative = command_file.parent.relative_to(base_path)
            if any(part.startswith(IGNORE_PREFIX) for part in relative.parts):
                continue

            module_name = ".".join(
                (COMMAND_PACKAGE, *relative.parts, COMMAND_FILE.replace(".py", ""))
            )
            try:
                module = importlib.import_module(module_name)
            except Exception as e:
                self.logger.error(f"Error loading commands from {command_file}: {e}")
                continue

            for _, obj in inspect.getmembers(module, inspect.isclass):
                cmd = getattr(obj, COMMAND_ATTR, None)
                if not isinstance(cmd, click.Command) or obj.__module__ != module_name:
                    continue
                cmd_name = getattr(cmd, NAME_ATTR)
                self.commands[cmd_name] = cmd
                self.logger.debug(f"Discovered command: {cmd_name}")

    def create_cli(self) -> click.Group:
        """Create the CLI group with all discovered commands."""

        @click.group(name="fcplan")
        @click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
        @click.option("--debug", is_flag=True, help="Enable debug mode")
        @click.version_option(version=CLI_VERSION, message="%(version)s")
        @click.pass_context
        def cli_group(
            ctx: click.Context, verbose: bool = False, debug: bool = False, **_: Any
        ) -> None:
            """Forecast-aware cooperative multi-robot planning experiments."""
            LoggingModule.configure_console_logging(
                injector=self.injector, verbose=verbose, debug=debug, logger=self.logger
            )
            ctx.ensure_object(dict)
            ctx.obj.update(
                CliContext(injector=self.injector, verbose=verbose, debug=debug)
            )

        for name in sorted(self.commands):
            cli_group.add_command(self.commands[name])

        return cli_group
