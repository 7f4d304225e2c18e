"""Console output, progress tracking and logging setup for terrace-lab."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable
from typing import Any

import click
from rich.align import Align
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table
from rich.text import Text
from rich.tree import Tree
from typer.core import TyperGroup

from .config import BANNER, TAGLINE

# Global console instance
console = Console()

_STATUS_STYLE = {
    "pending": ("[green dim]○[/green dim]", "bright_black"),
    "running": ("[cyan]○[/cyan]", "white"),
    "done": ("[green]●[/green]", "white"),
    "error": ("[red]●[/red]", "white"),
    "skipped": ("[yellow]○[/yellow]", "white"),
}


def configure_logging(verbose: bool = False) -> None:
    """Route the package loggers through a single RichHandler.

    Args:
        verbose: Log at DEBUG instead of WARNING.
    """
    logger = logging.getLogger("terrace_lab")
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(console=console, show_path=False, markup=False)
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(handler)
    logger.propagate = False


class StepTracker:
    """Track the stages of a run and render them as a tree.

    Stages are keyed; each holds a label, a status and an optional detail.
    A refresh callback can be attached for live display.
    """

    def __init__(self, title: str) -> None:
        self.title = title
        self.steps: list[dict[str, str]] = []
        self._refresh_cb: Callable[[], None] | None = None

    def attach_refresh(self, cb: Callable[[], None]) -> None:
        self._refresh_cb = cb

    def add(self, key: str, label: str) -> None:
        """Add a pending stage unless the key is already tracked."""
        if all(s["key"] != key for s in self.steps):
            self.steps.append(
                {"key": key, "label": label, "status": "pending", "detail": ""}
            )
            self._maybe_refresh()

    def start(self, key: str, detail: str = "") -> None:
        self._update(key, "running", detail)

    def complete(self, key: str, detail: str = "") -> None:
        self._update(key, "done", detail)

    def error(self, key: str, detail: str = "") -> None:
        self._update(key, "error", detail)

    def skip(self, key: str, detail: str = "") -> None:
        self._update(key, "skipped", detail)

    def _update(self, key: str, status: str, detail: str) -> None:
        for s in self.steps:
            if s["key"] == key:
                s["status"] = status
                if detail:
                    s["detail"] = detail
                break
        else:
            self.steps.append(
                {"key": key, "label": key, "status": status, "detail": detail}
            )
        self._maybe_refresh()

    def _maybe_refresh(self) -> None:
        if self._refresh_cb is not None:
            try:
                self._refresh_cb()
            except Exception:
                pass

    def render(self) -> Tree:
        """Render the stages as a rich Tree.

        Returns:
            Tree with one line per stage.
        """
        tree = Tree(f"[cyan]{self.title}[/cyan]", guide_style="grey50")
        for step in self.steps:
            symbol, style = _STATUS_STYLE.get(step["status"], (" ", "white"))
            detail = step["detail"].strip()
            if step["status"] == "pending":
                text = f"{step['label']} ({detail})" if detail else step["label"]
                tree.add(f"{symbol} [{style}]{text}[/{style}]")
            elif detail:
                tree.add(
                    f"{symbol} [white]{step['label']}[/white] "
                    f"[bright_black]({detail})[/bright_black]"
                )
            else:
                tree.add(f"{symbol} [white]{step['label']}[/white]")
        return tree


def key_value_panel(title: str, rows: Iterable[tuple[str, Any]]) -> Panel:
    """Build the two-column key/value panel used by the report commands.

    Args:
        title: Panel title.
        rows: (key, value) pairs; an empty key inserts a spacer row.

    Returns:
        A cyan-bordered Panel.
    """
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column("Key", style="cyan", justify="right")
    table.add_column("Value", style="white")
    for key, value in rows:
        table.add_row(key, "" if value is None else str(value))
    return Panel(
        table,
        title=f"[bold cyan]{title}[/bold cyan]",
        border_style="cyan",
        padding=(1, 2),
    )


def show_banner() -> None:
    """Display the ASCII art banner with gradient colors."""
    colors = ["bright_blue", "blue", "cyan", "bright_cyan", "white", "bright_white"]
    styled = Text()
    for i, line in enumerate(BANNER.strip().split("\n")):
        styled.append(line + "\n", style=colors[i % len(colors)])
    console.print(Align.center(styled))
    console.print(Align.center(Text(TAGLINE, style="italic bright_yellow")))
    console.print()


class BannerGroup(TyperGroup):
    """Typer group that shows the banner before the help text."""

    def format_help(self, ctx: click.Context, formatter: click.HelpFormatter) -> None:
        show_banner()
        super().format_help(ctx, formatter)
