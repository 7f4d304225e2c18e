"""Parameters, kinetics, grids and the competitive order.

The system under study is

    u_t - u_xx   = u (1 - u - a v)
    v_t - d v_xx = r v (1 - v - b u)

in the monostable regime d > 0, r > 0, 0 < a < 1, b > 1, where (1, 0) is
stable and (0, 1) is unstable. The δ-perturbed kinetics

    u (1 + δ - u - a v),   r v (1 - 2δ - v - b u)

are used by the barrier constructions; δ = 0 gives the true system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import INVARIANT_TOL
from .errors import DomainError, GridMismatch, OutOfRegime

FloatArray = NDArray[np.float64]


@dataclass(frozen=True)
class ModelParams:
    """The quadruple (d, r, a, b) of the competition-diffusion system."""

    d: float
    r: float
    a: float
    b: float

    @property
    def kpp_u_speed(self) -> float:
        """KPP speed of u invading empty space (always 2)."""
        return 2.0

    @property
    def kpp_v_speed(self) -> float:
        """KPP speed of v invading empty space, 2√(rd)."""
        return 2.0 * math.sqrt(self.r * self.d)

    def as_dict(self) -> dict[str, float]:
        return {"d": self.d, "r": self.r, "a": self.a, "b": self.b}


def validate_params(p: ModelParams) -> ModelParams:
    """Check the monostable parameter ranges.

    Args:
        p: Candidate parameters.

    Returns:
        The same object when every range constraint holds.

    Raises:
        OutOfRegime: Naming the first offending field.
    """
    checks = (
        ("d", p.d, p.d > 0, "d must be positive"),
        ("r", p.r, p.r > 0, "r must be positive"),
        ("a", p.a, 0 < p.a < 1, "a must lie in (0, 1) for a monostable system"),
        ("b", p.b, p.b > 1, "b must exceed 1 for a monostable system"),
    )
    for name, value, ok, why in checks:
        if not (math.isfinite(value) and ok):
            raise OutOfRegime(name, value, f"{why}, got {name}={value!r}")
    return p


def reaction(
    p: ModelParams, u: ArrayLike, v: ArrayLike, delta: float = 0.0
) -> tuple[FloatArray, FloatArray]:
    """Evaluate the (δ-perturbed) kinetics pointwise.

    Args:
        p: Model parameters.
        u: u values (any shape, any real values).
        v: v values, broadcast against u.
        delta: Perturbation in [0, 1/2); 0 is the true system.

    Returns:
        (u(1+δ-u-av), r v(1-2δ-v-bu)).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    fu = u * (1.0 + delta - u - p.a * v)
    fv = p.r * v * (1.0 - 2.0 * delta - v - p.b * u)
    return fu, fv


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [x_min, x_max] with n nodes."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self) -> None:
        if self.n < 3:
            raise DomainError(f"a grid needs at least 3 nodes, got n={self.n}")
        if not self.x_max > self.x_min:
            raise DomainError(f"empty grid interval [{self.x_min}, {self.x_max}]")

    @classmethod
    def from_spacing(cls, x_min: float, x_max: float, dx: float) -> Grid:
        """Build the grid whose spacing is closest to dx, keeping both ends."""
        n = int(round((x_max - x_min) / dx)) + 1
        return cls(x_min, x_max, n)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> FloatArray:
        """Node coordinates; node i sits at x_min + i·dx."""
        return self.x_min + np.arange(self.n) * self.dx

    def contains(self, x: float) -> bool:
        return self.x_min <= x <= self.x_max


@dataclass(frozen=True, eq=False)
class StatePair:
    """The fields (u, v) on a grid at time t."""

    t: float
    u: FloatArray
    v: FloatArray
    grid: Grid = field(repr=False)

    def __post_init__(self) -> None:
        for name, arr in (("u", self.u), ("v", self.v)):
            if np.shape(arr) != (self.grid.n,):
                raise GridMismatch(
                    f"{name} has shape {np.shape(arr)}, expected ({self.grid.n},)"
                )

    def in_invariant_region(self, tol: float = INVARIANT_TOL) -> bool:
        """True iff every node lies in [-tol, 1+tol]²."""
        lo, hi = -tol, 1.0 + tol
        return bool(
            np.all((self.u >= lo) & (self.u <= hi))
            and np.all((self.v >= lo) & (self.v <= hi))
        )

    def with_fields(self, t: float, u: FloatArray, v: FloatArray) -> StatePair:
        return StatePair(t=t, u=u, v=v, grid=self.grid)


def constant_state(g: Grid, u: float, v: float, t: float = 0.0) -> StatePair:
    """A spatially homogeneous state."""
    return StatePair(t=t, u=np.full(g.n, float(u)), v=np.full(g.n, float(v)), grid=g)


def competitive_leq(s1: StatePair, s2: StatePair, tol: float = 0.0) -> bool:
    """Competitive order: s1 ⪯ s2 iff u1 ≤ u2 and v1 ≥ v2 at every node.

    Args:
        s1: Lower candidate.
        s2: Upper candidate.
        tol: Slack allowed in both inequalities.

    Raises:
        GridMismatch: If the states live on different grids or times.
    """
    if s1.grid != s2.grid:
        raise GridMismatch("states live on different grids")
    if abs(s1.t - s2.t) > 1e-12 * max(1.0, abs(s1.t)):
        raise GridMismatch(f"states at different times t={s1.t} and t={s2.t}")
    return bool(np.all(s1.u <= s2.u + tol) and np.all(s1.v >= s2.v - tol))
