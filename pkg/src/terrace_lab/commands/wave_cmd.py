"""Wave command for terrace-lab."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import typer

from .. import artifacts
from ..errors import TerraceLabError
from ..speeds import lambda_minus_inf_delta, phi_decay_delta
from ..ui import console, key_value_panel
from ..waves import is_monotone, profile_residual, solve_profile, uniqueness_condition
from ._shared import a_option, b_option, d_option, fail, model_params, r_option


def wave(
    c: float = typer.Option(..., "--c", help="Wave speed"),
    d: float = d_option(),
    r: float = r_option(),
    a: float = a_option(),
    b: float = b_option(),
    delta: float = typer.Option(0.0, "--delta", help="Perturbation of the kinetics"),
    truncation: float | None = typer.Option(
        None, "--truncation", help="Half-length of the moving frame"
    ),
    mesh: int | None = typer.Option(None, "--mesh", help="Number of mesh nodes"),
    c_llw: float | None = typer.Option(
        None, "--c-llw", help="Known c_LLW of the perturbed system"
    ),
    out_dir: Path = typer.Option(
        Path("results/wave"),
        "--out-dir",
        "-o",
        help="Directory for profile.csv and wave.json",
    ),
):
    """Solve a traveling-wave profile and compare its tails with the predicted rates."""
    p = model_params(d, r, a, b)
    with console.status(f"[cyan]Solving the profile at c={c:g}...[/cyan]"):
        try:
            w = solve_profile(
                c, p, delta, truncation=truncation, mesh=mesh, c_llw=c_llw
            )
            plus, minus = w.measured_decay_plus, w.measured_decay_minus
        except TerraceLabError as e:
            fail(str(e))

    predicted_plus = phi_decay_delta(c, p.a, delta)
    predicted_minus = lambda_minus_inf_delta(c, p, delta)
    report: dict[str, Any] = {
        "c": c,
        "delta": delta,
        "params": p.as_dict(),
        "truncation": w.truncation,
        "mesh_spacing": w.h,
        "normalization": w.normalization,
        "newton_iterations": w.newton_iterations,
        "residual": profile_residual(w, p),
        "monotone": is_monotone(w),
        "unique_up_to_translation": uniqueness_condition(p),
        "truncation_error": w.truncation_error(),
        "decay": {
            "plus": {
                "measured": plus,
                "predicted": predicted_plus,
                "band": list(w.default_plus_band),
            },
            "minus": {
                "measured": minus,
                "predicted": predicted_minus,
                "band": list(w.default_minus_band),
            },
        },
    }
    artifacts.write_profile(out_dir, w)
    artifacts.write_wave_report(out_dir, report)

    console.print(
        key_value_panel(
            f"Wave profile c={c:g}, δ={delta:g}",
            [
                ("Newton iterations", w.newton_iterations),
                ("Residual", f"{report['residual']:.3e}"),
                ("Monotone", report["monotone"]),
                ("", ""),
                ("φ decay (+∞)", f"{plus:.6g} (predicted {predicted_plus:.6g})"),
                ("ψ decay (-∞)", f"{minus:.6g} (predicted {predicted_minus:.6g})"),
                ("", ""),
                ("Output", str(out_dir)),
            ],
        )
    )
