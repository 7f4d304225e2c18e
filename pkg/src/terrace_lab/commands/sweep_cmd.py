"""Sweep command for terrace-lab."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np
import typer

from .. import artifacts
from ..runner import SweepCell, sweep_cell, trichotomy_row
from ..speeds import linear_determinacy
from ..ui import console, key_value_panel
from ._shared import (
    a_option,
    b_option,
    d_option,
    fail,
    model_params,
    r_option,
    thread_count,
)

_PARAM_NAMES = ("d", "r", "a", "b")


def _parse_values(raw: str) -> list[float]:
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        fail(f"--values must be a comma-separated list of numbers, got {raw!r}")


def sweep(
    d: float = d_option(),
    r: float = r_option(),
    a: float = a_option(),
    b: float = b_option(),
    c1_min: float = typer.Option(2.0, "--c1-min"),
    c1_max: float = typer.Option(4.0, "--c1-max"),
    c1_steps: int = typer.Option(11, "--c1-steps"),
    c2_min: float = typer.Option(1.0, "--c2-min"),
    c2_max: float = typer.Option(3.0, "--c2-max"),
    c2_steps: int = typer.Option(11, "--c2-steps"),
    c_llw: float | None = typer.Option(
        None, "--c-llw", help="c_LLW (default: analytic when linearly determined)"
    ),
    simulate: bool = typer.Option(
        False, "--simulate", help="Measure speeds of interior cells with a short run"
    ),
    t_end: float = typer.Option(
        60.0, "--t-end", help="Final time of the per-cell runs"
    ),
    dx: float = typer.Option(0.1, "--dx", help="Grid spacing of the per-cell runs"),
    vary: str | None = typer.Option(
        None,
        "--vary",
        help="Sweep one parameter (d, r, a or b) instead of the speed plane",
    ),
    values: str | None = typer.Option(
        None, "--values", help="Comma-separated values for --vary"
    ),
    threads: int = typer.Option(
        1, "--threads", help="Worker processes (TERRACE_LAB_THREADS overrides)"
    ),
    out_dir: Path = typer.Option(
        Path("results/sweep"),
        "--out-dir",
        "-o",
        help="Directory for region.csv or trichotomy.csv",
    ),
):
    """Classify a grid of speed pairs, or map the trichotomy along one parameter."""
    p = model_params(d, r, a, b)

    if vary is not None:
        if vary not in _PARAM_NAMES:
            fail(f"--vary must be one of {', '.join(_PARAM_NAMES)}, got {vary!r}")
        if not values:
            fail("--vary needs --values")
        points = []
        for value in _parse_values(values):
            point = model_params(**{**p.as_dict(), vary: value})
            points.append((value, *trichotomy_row(point, c_llw)))
        path = artifacts.write_trichotomy(out_dir, vary, points)
        rows = [("Points", len(points)), ("Output", str(path))]
        console.print(key_value_panel("Trichotomy sweep", rows))
        return

    if c1_steps < 1 or c2_steps < 1:
        fail("grid steps must be positive")
    if c_llw is None:
        c_llw = linear_determinacy(p).c_llw
    if c_llw is None:
        fail("c_LLW is not linearly determined for these parameters; pass --c-llw")

    base = SweepCell(0.0, 0.0, p, c_llw, simulate, t_end, dx)
    cells = [
        replace(base, c1=float(x1), c2=float(x2))
        for x1 in np.linspace(c1_min, c1_max, c1_steps)
        for x2 in np.linspace(c2_min, c2_max, c2_steps)
    ]
    workers = thread_count(threads)
    status = f"[cyan]Sweeping {len(cells)} cells on {workers} worker(s)...[/cyan]"
    with console.status(status):
        if workers == 1:
            rows = [sweep_cell(cell) for cell in cells]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(sweep_cell, cells))
    path = artifacts.write_region(out_dir, rows)

    counts: dict[str, int] = {}
    for row in rows:
        counts[row[2]] = counts.get(row[2], 0) + 1
    summary = [(k, v) for k, v in sorted(counts.items())]
    summary += [("", ""), ("Output", str(path))]
    console.print(key_value_panel(f"Region sweep ({len(cells)} cells)", summary))
