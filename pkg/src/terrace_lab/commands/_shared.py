"""Options and helpers shared by the commands."""

from __future__ import annotations

import os
from typing import NoReturn

import typer

from ..config import PARAM_SETS, THREADS_ENV_VAR
from ..errors import TerraceLabError
from ..model import ModelParams, validate_params
from ..ui import console

_P_STAR = PARAM_SETS["p_star"]


def d_option() -> float:
    return typer.Option(_P_STAR["d"], "-d", help="Diffusivity of v")


def r_option() -> float:
    return typer.Option(_P_STAR["r"], "-r", help="Growth rate of v")


def a_option() -> float:
    return typer.Option(
        _P_STAR["a"], "-a", help="Competition coefficient of v on u (0 < a < 1)"
    )


def b_option() -> float:
    return typer.Option(
        _P_STAR["b"], "-b", help="Competition coefficient of u on v (b > 1)"
    )


def fail(message: str, code: int = 1) -> NoReturn:
    console.print(f"[red]Error:[/red] {message}")
    raise typer.Exit(code)


def model_params(d: float, r: float, a: float, b: float) -> ModelParams:
    """Validated parameters, exiting with code 1 when out of regime."""
    try:
        return validate_params(ModelParams(d=d, r=r, a=a, b=b))
    except TerraceLabError as e:
        fail(str(e))


def thread_count(flag: int) -> int:
    """Worker count from ``--threads``, overridden by the environment when set."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or not raw.strip():
        return max(1, flag)
    try:
        return max(1, int(raw))
    except ValueError:
        fail(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}")
