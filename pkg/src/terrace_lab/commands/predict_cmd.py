"""Predict command for terrace-lab."""

from __future__ import annotations

import json
from typing import Any

import typer

from ..artifacts import to_jsonable
from ..errors import BoundaryCase, TerraceLabError
from ..speeds import linear_determinacy, predict_trichotomy
from ._shared import a_option, b_option, d_option, fail, model_params, r_option


def _emit(payload: dict[str, Any]) -> None:
    typer.echo(json.dumps(to_jsonable(payload), indent=2, sort_keys=True))


def predict(
    d: float = d_option(),
    r: float = r_option(),
    a: float = a_option(),
    b: float = b_option(),
    c_llw: float | None = typer.Option(
        None,
        "--c-llw",
        help=(
            "Speed of u invading v at equilibrium "
            "(default: analytic if linearly determined, else simulated)"
        ),
    ),
):
    """Print the predicted spreading speeds (c1*, c2*) as JSON.

    Exits with code 2 when the parameters sit on a regime boundary.
    """
    p = model_params(d, r, a, b)
    det = linear_determinacy(p)
    payload: dict[str, Any] = {
        "params": p.as_dict(),
        "linear_determinacy": {"llw": det.llw_condition, "huang": det.huang_condition},
    }
    source = "given"
    if c_llw is None and det.c_llw is not None:
        c_llw, source = det.c_llw, "linear_determinacy"
    if c_llw is None:
        from ..waves import estimate_c_llw

        try:
            c_llw, source = estimate_c_llw(p), "simulation"
        except TerraceLabError as e:
            fail(f"could not estimate c_LLW: {e}")
    payload.update(c_llw=c_llw, c_llw_source=source)

    try:
        prediction = predict_trichotomy(p, c_llw)
    except BoundaryCase as e:
        payload.update(boundary=True, detail=e.detail)
        _emit(payload)
        raise typer.Exit(2)
    except TerraceLabError as e:
        fail(str(e))
    payload.update(boundary=False, prediction=prediction.as_dict())
    _emit(payload)
