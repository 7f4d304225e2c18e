"""Placement of the exponential terrace pair between the terrace barriers.

The system is autonomous, so translated barriers are still barriers. The
super pair moves right until ū(0,·) ≥ u0 and the sub pair moves left until
u̲(0,·) ≤ u0. x_v is then taken from the interval on which
v̲(0,·) ≤ v0 ≤ v̄(0,·) holds at every grid node.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.optimize import brentq

from ..config import COMPARISON_TOL, DELTA_CANDIDATES, ROOT_XTOL
from ..errors import HypothesisViolated, NotAdmissible, TerraceLabError
from ..model import FloatArray, Grid, ModelParams
from ..seeds import sandwiched_by, terrace_pair
from ..speeds import delta_star, lambda_v
from .assembly import BarrierKind, assemble

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TerracePlacement:
    """x_v and the barrier translations that sandwich the exponential pair."""

    x_v: float
    delta: float
    super_shift: float
    sub_shift: float
    x_v_interval: tuple[float, float]

    def as_dict(self) -> dict[str, Any]:
        return {
            "x_v": self.x_v,
            "delta": self.delta,
            "super_shift": self.super_shift,
            "sub_shift": self.sub_shift,
            "x_v_interval": [None if math.isinf(b) else b for b in self.x_v_interval],
        }


def _least_shift(
    gap: Callable[[float], float], span: float, what: str, tol: float
) -> float:
    """Smallest s in [0, span] with gap(s) ≥ -tol, for a gap nondecreasing in s."""
    if gap(0.0) >= -tol:
        return 0.0
    if gap(span) < -0.5 * tol:
        raise HypothesisViolated(f"no shift up to {span:g} puts {what}")
    return float(brentq(lambda s: gap(s) + 0.5 * tol, 0.0, span, xtol=ROOT_XTOL))


def x_v_interval(
    x: FloatArray,
    v_under: FloatArray,
    v_over: FloatArray,
    rate: float,
    tol: float = COMPARISON_TOL,
) -> tuple[float, float]:
    """Bounds on x_v from v̲ ≤ min(1, e^{-rate(x - x_v)}) ≤ v̄ at every node.

    The interval is empty (lo > hi) when v̄ vanishes somewhere.
    """
    if np.any(v_over <= 0.0):
        return math.inf, -math.inf
    active = v_under > tol
    lo = -math.inf
    if np.any(active):
        lo = float(np.max(x[active] + np.log(v_under[active]) / rate))
    below_one = v_over < 1.0
    hi = math.inf
    if np.any(below_one):
        hi = float(np.min(x[below_one] + np.log(v_over[below_one]) / rate))
    return lo, hi


def _place(
    g: Grid,
    p: ModelParams,
    c1: float,
    c2: float,
    delta: float,
    c_llw: float | None,
    u_cap: float,
    tol: float,
) -> TerracePlacement:
    aux = {} if c_llw is None else {"c_llw": c_llw}
    speeds = {"c1": c1, "c2": c2}
    upper = assemble(BarrierKind.TERRACE_SUPER, p, speeds, delta, aux)
    lower = assemble(BarrierKind.TERRACE_SUB, p, speeds, delta, aux)
    u0, _ = terrace_pair(g, p, c1, c2, u_cap=u_cap, c_llw=c_llw)
    x = g.x
    span = g.x_max - g.x_min

    super_shift = _least_shift(
        lambda s: float(np.min(upper.u(0.0, x - s) - u0)), span, "ū(0,·) above u0", tol
    )
    sub_shift = _least_shift(
        lambda s: float(np.min(u0 - lower.u(0.0, x + s))), span, "u̲(0,·) below u0", tol
    )
    upper_fields = (upper.u(0.0, x - super_shift), upper.v(0.0, x - super_shift))
    lower_fields = (lower.u(0.0, x + sub_shift), lower.v(0.0, x + sub_shift))

    rate = lambda_v(c1, p.r, p.d)
    lo, hi = x_v_interval(x, upper_fields[1], lower_fields[1], rate, tol)
    if lo > hi:
        raise HypothesisViolated(
            f"v̲(0,·) ≤ v0 ≤ v̄(0,·) needs x_v ≥ {lo:.6g} and x_v ≤ {hi:.6g}"
        )
    x_v = min(max(0.0, lo), hi)
    u0, v0 = terrace_pair(g, p, c1, c2, x_v=x_v, u_cap=u_cap, c_llw=c_llw)
    if not sandwiched_by(u0, v0, lower_fields, upper_fields, tol):
        raise HypothesisViolated(
            f"terrace pair with x_v={x_v:.6g} is not sandwiched on the grid"
        )
    return TerracePlacement(x_v, delta, super_shift, sub_shift, (lo, hi))


def place_terrace_pair(
    g: Grid,
    p: ModelParams,
    c1: float,
    c2: float,
    delta: float | None = None,
    c_llw: float | None = None,
    u_cap: float = 1.0,
    tol: float = COMPARISON_TOL,
) -> TerracePlacement:
    """Choose x_v so the terrace barriers sandwich the exponential pair on the grid.

    x_v is the point of the admissible interval closest to 0. Without an
    explicit δ the candidates from delta_star downwards are tried in turn.

    Args:
        g: Grid the pair is realized on.
        p: Model parameters.
        c1: First-front speed.
        c2: Second-front speed.
        delta: Barrier perturbation.
        c_llw: Minimal speed passed to the admissibility check.
        u_cap: Left plateau of u0.
        tol: Slack of the competitive comparisons.

    Raises:
        NotAdmissible: If (c1, c2) is not an interior admissible pair.
        HypothesisViolated: If no translation of the barriers and no x_v
            sandwich the pair on this grid.
    """
    if delta is not None:
        placement = _place(g, p, c1, c2, delta, c_llw, u_cap, tol)
    else:
        largest = delta_star(p, c1, c2, "terrace")
        candidates = sorted((d for d in DELTA_CANDIDATES if d <= largest), reverse=True)
        failures: list[str] = []
        for candidate in candidates:
            try:
                placement = _place(g, p, c1, c2, candidate, c_llw, u_cap, tol)
                break
            except NotAdmissible:
                raise
            except TerraceLabError as e:
                logger.debug(f"δ={candidate:g} gives no terrace sandwich: {e}")
                failures.append(f"δ={candidate:g}: {e}")
        else:
            raise HypothesisViolated("; ".join(failures))
    logger.info(
        f"terrace pair placed at x_v={placement.x_v:.6g} (δ={placement.delta:g}, "
        f"super shift {placement.super_shift:.4g}, sub shift {placement.sub_shift:.4g})"
    )
    return placement
