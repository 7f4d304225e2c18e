"""
Terrace Lab - spreading speeds of two competing species

Numerical laboratory for the Lotka-Volterra competition-diffusion system
with one slower resident and one faster invader: closed-form speed
predictions, a front-tracking solver, traveling-wave profiles and
certified barrier constructions.

Usage:
    terrace-lab predict -d 1 -r 1.21 -a 0.5 -b 1.1
    terrace-lab simulate --config trichotomy_case2
    terrace-lab wave --c 1.8
    terrace-lab verify-barriers --which terrace_super --c1 3 --c2 1.8
    terrace-lab sweep --simulate --threads 4
"""

import sys

import typer
from rich.align import Align

from ._version import __version__
from .commands import predict, simulate, sweep, verify_barriers, version, wave
from .ui import BannerGroup, configure_logging, console, show_banner

app = typer.Typer(
    name="terrace-lab",
    help="Spreading speeds, traveling waves and barrier certificates "
    "for competing species",
    add_completion=False,
    invoke_without_command=True,
    cls=BannerGroup,
)


@app.callback()
def callback(
    ctx: typer.Context,
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at DEBUG level"),
):
    """Show banner when no subcommand is provided."""
    configure_logging(verbose)
    asked_help = "--help" in sys.argv or "-h" in sys.argv
    if ctx.invoked_subcommand is None and not asked_help:
        show_banner()
        console.print(
            Align.center("[dim]Run 'terrace-lab --help' for usage information[/dim]")
        )
        console.print()


# Register commands
app.command()(predict)
app.command()(simulate)
app.command()(wave)
app.command(name="verify-barriers")(verify_barriers)
app.command()(sweep)
app.command()(version)


def main():
    app()


__all__ = ["__version__", "app", "main"]


if __name__ == "__main__":
    main()
