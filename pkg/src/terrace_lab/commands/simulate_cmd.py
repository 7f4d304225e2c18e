"""Simulate command for terrace-lab."""

from __future__ import annotations

from pathlib import Path

import typer
from rich.live import Live

from .. import scenario as scenario_io
from ..errors import ConfigError, TerraceLabError
from ..runner import run_scenario
from ..scenario import Scenario
from ..ui import StepTracker, console, key_value_panel
from ._shared import fail


def _resolve(config: str) -> Scenario:
    path = Path(config)
    if path.exists():
        return scenario_io.load(path)
    return scenario_io.load(scenario_io.bundled(config))


def simulate(
    config: str | None = typer.Option(
        None, "--config", "-c", help="Scenario file, or the name of a bundled scenario"
    ),
    out_dir: Path | None = typer.Option(
        None,
        "--out-dir",
        "-o",
        help="Directory for the result files (default: results/<scenario>)",
    ),
    list_bundled: bool = typer.Option(
        False, "--list", help="List the bundled scenarios and exit"
    ),
):
    """Run a scenario and write its front tracks, field dumps and summary."""
    if list_bundled:
        for name in scenario_io.bundled_names():
            console.print(f"  • {name}")
        return
    if config is None:
        fail("Must specify --config (a scenario file or bundled name)")

    try:
        sc = _resolve(config)
    except ConfigError as e:
        fail(f"invalid scenario: {e}")
    out_dir = out_dir or Path("results") / sc.name

    tracker = StepTracker(f"Scenario {sc.name}")
    for key, label in (
        ("setup", "Build grid and seeds"),
        ("integrate", "Integrate"),
        ("analyze", "Evaluate analyses"),
        ("write", "Write artifacts"),
    ):
        tracker.add(key, label)
    # Keep the error outside Live so it prints after the transient display
    run_error: TerraceLabError | None = None
    with Live(
        tracker.render(), console=console, refresh_per_second=8, transient=True
    ) as live:
        tracker.attach_refresh(lambda: live.update(tracker.render()))
        try:
            summary = run_scenario(sc, out_dir, tracker)
        except TerraceLabError as e:
            run_error = e
    console.print(tracker.render())
    if run_error is not None:
        fail(str(run_error))

    verdict = {True: "[green]pass[/green]", False: "[red]fail[/red]", None: "report"}
    rows: list[tuple[str, object]] = []
    for result in summary.analyses:
        speed = result.measured.get("fitted_speed")
        detail = f" (c={speed:.5g})" if isinstance(speed, float) else ""
        rows.append((result.name, f"{verdict[result.passed]}{detail}"))
    rows += [
        ("", ""),
        ("Wall clock", f"{summary.wall_clock:.1f} s"),
        ("Output", str(out_dir)),
    ]
    console.print(key_value_panel(f"{sc.name} summary", rows))

    if not summary.passed:
        raise typer.Exit(1)
