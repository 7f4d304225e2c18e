"""Initial-data generators.

Every generator returns fields with values in [0, 1]. Edges of bumps and
half-line data use a cosine taper of width 1 in space units, independent of
the grid spacing.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .config import COMPARISON_TOL
from .errors import ConfigError, DomainError, NotAdmissible, SupportOutsideGrid
from .model import FloatArray, Grid, ModelParams
from .speeds import Admissibility, admissible, big_lambda, lambda_v, linear_determinacy

TAPER_WIDTH = 1.0

FIELD_KINDS = ("bump", "heaviside_like", "exp_tail", "constant")
PAIR_KINDS = ("terrace_pair", "llw_background")


@dataclass(frozen=True)
class SeedSpec:
    """A named generator and its keyword options, as written in a scenario."""

    kind: str
    options: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in FIELD_KINDS + PAIR_KINDS:
            raise ConfigError("kind", f"unknown seed kind {self.kind!r}")

    @property
    def is_pair(self) -> bool:
        return self.kind in PAIR_KINDS

    def as_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, **dict(self.options)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SeedSpec:
        data = dict(data)
        kind = data.pop("kind", None)
        if kind is None:
            raise ConfigError("kind", "seed entry has no kind")
        return cls(kind=str(kind), options=data)


def bump(
    g: Grid, center: float, halfwidth: float, amplitude: float = 1.0
) -> FloatArray:
    """Cosine bump, exactly zero outside [center - halfwidth, center + halfwidth].

    Raises:
        DomainError: If amplitude is not in (0, 1] or halfwidth is not positive.
        SupportOutsideGrid: If the support leaves the grid.
    """
    if not 0.0 < amplitude <= 1.0:
        raise DomainError(f"bump amplitude must lie in (0, 1], got {amplitude}")
    if not halfwidth > 0:
        raise DomainError(f"bump halfwidth must be positive, got {halfwidth}")
    if not (g.contains(center - halfwidth) and g.contains(center + halfwidth)):
        raise SupportOutsideGrid(
            f"bump support [{center - halfwidth:g}, {center + halfwidth:g}] "
            f"leaves the grid [{g.x_min:g}, {g.x_max:g}]"
        )
    x = g.x
    inside = np.abs(x - center) < halfwidth
    shape = 0.5 * (1.0 + np.cos(np.pi * (x - center) / halfwidth))
    return np.where(inside, amplitude * shape, 0.0)


def heaviside_like(g: Grid, edge: float) -> FloatArray:
    """1 for x ≤ edge - 1, cosine drop to exactly 0 at x ≥ edge.

    Raises:
        SupportOutsideGrid: If the edge is outside the grid.
    """
    if not g.contains(edge):
        raise SupportOutsideGrid(f"edge {edge:g} is outside [{g.x_min:g}, {g.x_max:g}]")
    x = g.x
    start = edge - TAPER_WIDTH
    taper = 0.5 * (1.0 + np.cos(np.pi * (x - start) / TAPER_WIDTH))
    return np.where(x <= start, 1.0, np.where(x >= edge, 0.0, taper))


def exp_tail(g: Grid, rate: float, anchor: float) -> FloatArray:
    """min(1, e^{-rate (x - anchor)})."""
    if not rate > 0:
        raise DomainError(f"exp_tail rate must be positive, got {rate}")
    return np.minimum(1.0, np.exp(-rate * (g.x - anchor)))


def constant(g: Grid, value: float) -> FloatArray:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"constant seed must lie in [0, 1], got {value}")
    return np.full(g.n, float(value))


def weighted_bound(v0: FloatArray, g: Grid, rate: float) -> float:
    """sup over the grid of v0(x)·e^{rate·x}, evaluated in log space."""
    positive = v0 > 0
    if not np.any(positive):
        return 0.0
    logs = np.log(v0[positive]) + rate * g.x[positive]
    return float(math.exp(min(float(logs.max()), 709.0)))


def terrace_pair(
    g: Grid,
    p: ModelParams,
    c1: float,
    c2: float,
    x_v: float = 0.0,
    u_cap: float = 1.0,
    c_llw: float | None = None,
) -> tuple[FloatArray, FloatArray]:
    """Exponential initial pair whose fronts settle at speeds (c1, c2).

    u0 = min(u_cap, e^{-Λ(c2, c1) x}) and v0 = min(1, e^{-λ_v(c1)(x - x_v)}).

    Raises:
        NotAdmissible: If (c1, c2) is not an interior admissible pair.
    """
    if c_llw is None:
        c_llw = linear_determinacy(p).c_llw or 2.0 * math.sqrt(1.0 - p.a)
    try:
        klass = admissible(c1, c2, p, c_llw)
    except DomainError as e:
        raise NotAdmissible(c1, c2, "below minimal speeds") from e
    if klass is not Admissibility.INTERIOR:
        raise NotAdmissible(c1, c2, klass.value)
    u0 = np.minimum(u_cap, np.exp(-big_lambda(c2, c1, p.a) * g.x))
    v0 = np.minimum(1.0, np.exp(-lambda_v(c1, p.r, p.d) * (g.x - x_v)))
    return u0, v0


def llw_background(
    g: Grid, p: ModelParams, center: float | None = None, halfwidth: float = 5.0
) -> tuple[FloatArray, FloatArray]:
    """Compact u on the left of a v ≡ 1 background."""
    if center is None:
        center = g.x_min + 2.0 * halfwidth
    return bump(g, center, halfwidth), np.ones(g.n)


def sandwiched_by(
    u0: FloatArray,
    v0: FloatArray,
    lower: tuple[FloatArray, FloatArray],
    upper: tuple[FloatArray, FloatArray],
    tol: float = COMPARISON_TOL,
) -> bool:
    """True iff lower ⪯ (u0, v0) ⪯ upper in the competitive order."""
    lu, lv = lower
    hu, hv = upper
    return bool(
        np.all(lu <= u0 + tol)
        and np.all(lv >= v0 - tol)
        and np.all(u0 <= hu + tol)
        and np.all(v0 >= hv - tol)
    )


def ordered_pair(
    g: Grid, rng: np.random.Generator, n_bumps: int = 3
) -> tuple[tuple[FloatArray, FloatArray], tuple[FloatArray, FloatArray]]:
    """Random initial data (lower, upper) with lower ⪯ upper.

    The lower pair is a sum of random bumps for u and v; the upper pair adds
    a further u bump and scales v down.
    """
    span = g.x_max - g.x_min
    margin = 0.1 * span

    def random_field() -> FloatArray:
        w = np.zeros(g.n)
        for _ in range(n_bumps):
            hw = rng.uniform(0.02, 0.1) * span
            center = rng.uniform(g.x_min + margin + hw, g.x_max - margin - hw)
            w += bump(g, center, hw, rng.uniform(0.1, 1.0))
        return np.minimum(w, 1.0)

    u_lo, v_lo = random_field(), random_field()
    hw = rng.uniform(0.02, 0.1) * span
    center = rng.uniform(g.x_min + margin + hw, g.x_max - margin - hw)
    u_hi = np.minimum(1.0, u_lo + rng.uniform(0.05, 0.3) * bump(g, center, hw))
    v_hi = v_lo * rng.uniform(0.5, 0.95)
    return (u_lo, v_lo), (u_hi, v_hi)


def realize_field(spec: SeedSpec, g: Grid) -> FloatArray:
    """Build a single field from a scenario seed entry."""
    o = dict(spec.options)
    try:
        if spec.kind == "bump":
            return bump(g, o["center"], o["halfwidth"], o.get("amplitude", 1.0))
        if spec.kind == "heaviside_like":
            return heaviside_like(g, o["edge"])
        if spec.kind == "exp_tail":
            return exp_tail(g, o["rate"], o.get("anchor", 0.0))
        if spec.kind == "constant":
            return constant(g, o["value"])
    except KeyError as e:
        raise ConfigError(
            str(e.args[0]), f"missing option for seed kind {spec.kind}"
        ) from e
    raise ConfigError(
        "kind", f"seed kind {spec.kind!r} does not produce a single field"
    )


def realize_pair(
    spec: SeedSpec, g: Grid, p: ModelParams
) -> tuple[FloatArray, FloatArray]:
    """Build an initial (u0, v0) pair from a scenario seed entry."""
    o = dict(spec.options)
    try:
        if spec.kind == "terrace_pair":
            if not isinstance(o.get("x_v", 0.0), (int, float)):
                raise ConfigError(
                    "x_v", "x_v must be a number once the pair is placed", o["x_v"]
                )
            return terrace_pair(
                g,
                p,
                o["c1"],
                o["c2"],
                x_v=o.get("x_v", 0.0),
                u_cap=o.get("u_cap", 1.0),
                c_llw=o.get("c_llw"),
            )
        if spec.kind == "llw_background":
            return llw_background(g, p, o.get("center"), o.get("halfwidth", 5.0))
    except KeyError as e:
        raise ConfigError(
            str(e.args[0]), f"missing option for seed kind {spec.kind}"
        ) from e
    raise ConfigError("kind", f"seed kind {spec.kind!r} does not produce a pair")
