"""Interfaces between adjacent barrier pieces.

An interface is a curve x(t) where the active piece of a barrier component
switches. Some move linearly by construction; the others are located at
each time as the crossing of the two pieces on either side, with a
bracket that the assembly proves contains exactly one crossing of the
required direction.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from ..config import INTERFACE_SCAN, INTERFACE_XTOL
from ..errors import NoBracket
from ..model import FloatArray
from .blocks import BuildingBlock

logger = logging.getLogger(__name__)

_LOG_FLOOR = 1e-300


class InterfaceId(str, Enum):
    X0 = "x0"
    XI1 = "xi1"
    X2 = "x2"
    X3_SMALL = "x3_small"
    X3_LARGE = "x3_large"
    XI4 = "xi4"
    X0_NE = "x0_ne"
    X1_NE = "x1_ne"


class Junction(str, Enum):
    """How two pieces are glued at an interface.

    MAX: the left piece is above the right one just left of the crossing,
    so the glued function is their maximum near it. MIN: the reverse.
    """

    MAX = "max"
    MIN = "min"


@dataclass(frozen=True)
class Bracket:
    """Search window [lo0 + lo_speed·t, hi0 + hi_speed·t]."""

    lo0: float
    lo_speed: float
    hi0: float
    hi_speed: float

    def at(self, t: float) -> tuple[float, float]:
        return self.lo0 + self.lo_speed * t, self.hi0 + self.hi_speed * t


@dataclass(frozen=True)
class _Linear:
    x0: float
    speed: float

    def __call__(self, t: float) -> float:
        return self.x0 + self.speed * t


@dataclass(frozen=True)
class _Crossing:
    left: BuildingBlock
    right: BuildingBlock
    interface_id: InterfaceId
    bracket: Bracket
    junction: Junction
    log_space: bool = True

    def __call__(self, t: float) -> float:
        return find_interface(
            self.left,
            self.right,
            self.interface_id,
            t,
            self.bracket.at(t),
            self.junction,
            self.log_space,
        )


@dataclass(frozen=True)
class InterfaceCurve:
    """A named interface x(t) with its gluing rule."""

    id: InterfaceId
    locate: Callable[[float], float]
    junction: Junction
    bracket_note: str = ""

    def __call__(self, t: float) -> float:
        return self.locate(t)

    def sample(self, times: FloatArray) -> FloatArray:
        return np.array([self.locate(float(t)) for t in times])


def linear_interface(
    interface_id: InterfaceId,
    x0: float,
    speed: float,
    junction: Junction,
    note: str = "",
) -> InterfaceCurve:
    return InterfaceCurve(interface_id, _Linear(x0, speed), junction, note or "linear")


def crossing_interface(
    interface_id: InterfaceId,
    left: BuildingBlock,
    right: BuildingBlock,
    bracket: Bracket,
    junction: Junction,
    note: str = "",
    log_space: bool = True,
) -> InterfaceCurve:
    locate = _Crossing(left, right, interface_id, bracket, junction, log_space)
    return InterfaceCurve(interface_id, locate, junction, note)


def find_interface(
    left: BuildingBlock,
    right: BuildingBlock,
    interface_id: InterfaceId,
    t: float,
    bracket: tuple[float, float],
    junction: Junction = Junction.MAX,
    log_space: bool = True,
) -> float:
    """First crossing in ``bracket`` where left - right changes sign per ``junction``.

    MAX needs left - right to go from positive to negative, MIN the
    reverse. With ``log_space`` the pieces are compared through
    ln(max(·, 1e-300)), which keeps deep exponential tails apart.

    Raises:
        NoBracket: If no crossing of the required direction is found.
    """
    lo, hi = bracket
    if not hi > lo:
        raise NoBracket(
            interface_id.value, f"empty bracket [{lo:g}, {hi:g}] at t={t:g}"
        )

    def gap(x: FloatArray | float) -> FloatArray:
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        a, b = left(t, xs), right(t, xs)
        if log_space:
            return np.log(np.maximum(a, _LOG_FLOOR)) - np.log(np.maximum(b, _LOG_FLOOR))
        return a - b

    xs = np.linspace(lo, hi, INTERFACE_SCAN + 1)
    g = gap(xs)
    sign = 1.0 if junction is Junction.MAX else -1.0
    hits = np.flatnonzero((sign * g[:-1] > 0) & (sign * g[1:] <= 0))
    if hits.size == 0:
        raise NoBracket(
            interface_id.value,
            f"no {junction.value} crossing in [{lo:.6g}, {hi:.6g}] at t={t:g}",
        )
    i = int(hits[0])
    if g[i + 1] == 0:
        return float(xs[i + 1])
    root = brentq(lambda z: float(gap(z)[0]), xs[i], xs[i + 1], xtol=INTERFACE_XTOL)
    if not math.isfinite(root):
        raise NoBracket(interface_id.value, f"non-finite crossing at t={t:g}")
    return float(root)
