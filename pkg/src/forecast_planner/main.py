import sys
from typing import List, Optional

import click
from injector import Injector

from forecast_planner.core.registry import CommandRegistry
from forecast_planner.exceptions import PlannerError
from forecast_planner.modules.injector_config import AppModule
from forecast_planner.utils.constants import ExitCode
from forecast_planner.utils.log_handlers import CliLogger


class CLI:
    def __init__(self) -> None:
        # Set up dependency injection
        self.injector = Injector([AppModule()])
        self.logger = self.injector.get(CliLogger)

    def run(self, args: Optional[List[str]] = None) -> int:
        """Run the CLI and return the process exit code."""
        try:
            registry = CommandRegistry(self.injector, self.logger)
            registry.discover_commands()
            cli = registry.create_cli()

            result = cli.main(
                args=args,
                prog_name="fcplan",
                standalone_mode=False,
                obj={"injector": self.injector},
            )
        except click.exceptions.Exit as e:
            return e.exit_code
        except click.exceptions.Abort:
            click.secho("Aborted", fg="red", err=True)
            return int(ExitCode.USAGE_ERROR)
        except click.ClickException as e:
            e.show()
            return int(ExitCode.USAGE_ERROR)
        except PlannerError as e:
            click.secho(f"Error: {e.message}", fg="red", err=True)
            return int(ExitCode.USAGE_ERROR)
        except Exception as e:
            self.logger.debug("Unhandled error", exc_info=True)
            click.secho(f"Error: {str(e)}", fg="red", err=True)
            return int(ExitCode.USAGE_ERROR)

        return result if isinstance(result, int) else int(ExitCode.OK)


def main() -> None:
    sys.exit(CLI().run())


if __name__ == "__main__":
    main()
