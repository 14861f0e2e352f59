from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Sequence, Tuple

from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn
from rich.table import Table


class ConsoleUI:
    """Console rendering for planner commands."""

    def __init__(self) -> None:
        self.console = Console()
        self._silent_mode = False

    @property
    def silent(self) -> bool:
        return self._silent_mode

    def set_silent_mode(self, silent: bool) -> None:
        """Enable/disable silent mode."""
        self._silent_mode = silent

    def display_info(self, message: str, style: str = "green") -> None:
        if self._silent_mode:
            return
        self.console.print(f"[{style}]{message}[/{style}]")

    def display_warning(self, message: str) -> None:
        if self._silent_mode:
            return
        self.console.print(f"[bold yellow]⚠️  {message}[/bold yellow]")

    def display_result(
        self, title: str, data: Dict[str, Any], border_style: str = "green"
    ) -> None:
        """Display a key/value result panel."""
        if self._silent_mode:
            return
        panel = Panel(
            "\n".join(f"{k}: {v}" for k, v in data.items()),
            title=title,
            border_style=border_style,
        )
        self.console.print(panel)

    def display_table(
        self, title: str, columns: Sequence[str], rows: List[Sequence[Any]]
    ) -> None:
        if self._silent_mode:
            return
        table = Table(title=title)
        for column in columns:
            table.add_column(column)
        for row in rows:
            table.add_row(*("-" if value is None else str(value) for value in row))
        self.console.print(table)

    @contextmanager
    def progress(self, message: str, total: int) -> Iterator[Tuple[Progress, Any]]:
        """Progress bar that renders nothing in silent mode."""
        progress = Progress(
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            console=self.console,
            disable=self._silent_mode,
        )
        with progress:
            task = progress.add_task(message, total=total)
            yield progress, task

