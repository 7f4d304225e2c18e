"""Verify-barriers command for terrace-lab."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import typer

from .. import artifacts
from ..barriers import BarrierKind, assemble, certify_residuals, interface_rows
from ..config import CERT_LATTICE, CERT_T_END, CERTIFY_SLACK
from ..errors import TerraceLabError
from ..speeds import delta_star
from ..ui import StepTracker, console, key_value_panel
from ._shared import (
    a_option,
    b_option,
    d_option,
    fail,
    model_params,
    r_option,
    thread_count,
)

INTERFACE_SAMPLES = 41

_DELTA_FAMILY = {
    BarrierKind.TERRACE_SUPER: "terrace",
    BarrierKind.COMPACT_SUPER: "compact",
    BarrierKind.NONEXISTENCE_SUB: "nonexistence",
}


def verify_barriers(
    which: BarrierKind = typer.Option(
        BarrierKind.TERRACE_SUPER, "--which", help="Barrier pair to assemble"
    ),
    d: float = d_option(),
    r: float = r_option(),
    a: float = a_option(),
    b: float = b_option(),
    c1: float | None = typer.Option(
        None, "--c1", help="Speed of the first front (not used by compact_super)"
    ),
    c2: float = typer.Option(..., "--c2", help="Speed of the second front"),
    delta: float = typer.Option(0.02, "--delta", help="Perturbation of the kinetics"),
    auto_delta: bool = typer.Option(
        False,
        "--auto-delta",
        help="Use the largest candidate δ passing the closed-form preconditions",
    ),
    horizon: float = typer.Option(
        CERT_T_END, "--horizon", help="Certification horizon T"
    ),
    n_t: int = typer.Option(CERT_LATTICE[0], "--lattice-t", help="Time samples"),
    n_x: int = typer.Option(CERT_LATTICE[1], "--lattice-x", help="Space samples"),
    slack: float = typer.Option(
        CERTIFY_SLACK, "--slack", help="Allowed wrong-sign margin"
    ),
    threads: int = typer.Option(
        1, "--threads", help="Worker threads (TERRACE_LAB_THREADS overrides)"
    ),
    out_dir: Path = typer.Option(
        Path("results/barriers"),
        "--out-dir",
        "-o",
        help="Directory for certificate.json and interfaces.csv",
    ),
):
    """Assemble a barrier pair and certify its differential inequalities.

    Exits with code 0 only when every lattice sample has the right sign.
    """
    p = model_params(d, r, a, b)
    if which is not BarrierKind.COMPACT_SUPER and c1 is None:
        fail(f"--c1 is required for {which.value}")
    speeds = {"c2": c2} if c1 is None else {"c1": c1, "c2": c2}
    workers = thread_count(threads)

    tracker = StepTracker(f"Certify {which.value}")
    tracker.add("delta", "Choose δ")
    tracker.add("assemble", "Assemble barrier pair")
    tracker.add("certify", f"Check signs on {n_t}x{n_x} lattice")
    tracker.add("write", "Write certificate")

    try:
        tracker.start("delta")
        if auto_delta:
            family = _DELTA_FAMILY.get(which)
            if family is None:
                tracker.skip("delta", f"no δ search for {which.value}, using {delta:g}")
            else:
                first = c1 if c1 is not None else float("nan")
                delta = delta_star(p, first, c2, family)
                tracker.complete("delta", f"δ*={delta:g}")
        else:
            tracker.complete("delta", f"{delta:g}")

        tracker.start("assemble")
        asm = assemble(which, p, speeds, delta, horizon=horizon)
        tracker.complete("assemble", f"{len(asm.interfaces)} interfaces")

        tracker.start("certify")
        report = certify_residuals(asm, (n_t, n_x), slack=slack, threads=workers)
    except TerraceLabError as e:
        console.print(tracker.render())
        fail(f"{type(e).__name__}: {e}")
    if report.certified:
        tracker.complete("certify", "all samples have the right sign")
    else:
        tracker.error("certify", f"{report.failures} wrong-sign samples")

    tracker.start("write")
    certificate = {**asm.summary(), **report.as_dict()}
    artifacts.write_certificate(out_dir, certificate)
    times = np.linspace(0.0, horizon, INTERFACE_SAMPLES)
    artifacts.write_interfaces(out_dir, interface_rows(asm, times))
    tracker.complete("write", str(out_dir))
    console.print(tracker.render())

    worst = report.worst()
    rows: list[tuple[str, object]] = [
        ("Certified", "[green]yes[/green]" if report.certified else "[red]no[/red]"),
        ("δ", f"{delta:g}"),
        ("Horizon", f"{report.t_end:g}"),
        ("Window", f"[{report.window[0]:.4g}, {report.window[1]:.4g}]"),
    ]
    if worst is not None:
        where = f"{worst.component}:{worst.piece}"
        rows.append(("Worst margin", f"{worst.worst:.3e} on {where}"))
    console.print(key_value_panel("Barrier certificate", rows))
    if not report.certified:
        raise typer.Exit(1)
