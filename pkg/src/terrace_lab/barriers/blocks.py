"""Building blocks of the barrier constructions.

Every block is a function of (t, x) that returns a :class:`Jet`: the value
together with ∂x, ∂xx and ∂t, which is all the parabolic operators need.
Closed-form blocks carry analytic derivatives. ODE-backed blocks (the KPP
fronts χ and π, the Dirichlet bumps ω and α, and the wave pair) take the
value and first derivative from their solver and the second derivative from
the ODE itself, so they satisfy their defining equation identically.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import Any, ClassVar, Literal

import numpy as np
from scipy.integrate import solve_bvp, solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq, minimize_scalar

from ..config import BVP_TOL, KPP_START, ROOT_XTOL, WAVE_TAIL_FIT_TOP, WAVE_TAIL_FLOOR
from ..errors import DomainError, NoConvergence
from ..model import FloatArray, ModelParams
from ..speeds import (
    big_lambda,
    f_of,
    lambda_u,
    lambda_v,
    phi_decay_delta,
    z_delta_bound,
)
from ..waves import EDGE_FRACTION, WaveProfile, measure_decay

logger = logging.getLogger(__name__)

Profile = tuple[FloatArray, FloatArray, FloatArray]

_PEAK_SAMPLES = 4001


@dataclass(frozen=True)
class Jet:
    """Value and the derivatives ∂x, ∂xx, ∂t of a field at sample points."""

    value: FloatArray
    dx: FloatArray
    dxx: FloatArray
    dt: FloatArray

    @classmethod
    def constant(cls, n: int, value: float) -> Jet:
        zero = np.zeros(n)
        return cls(np.full(n, float(value)), zero, zero.copy(), zero.copy())

    @classmethod
    def empty(cls, n: int) -> Jet:
        return cls(np.empty(n), np.empty(n), np.empty(n), np.empty(n))

    def scaled(self, k: float) -> Jet:
        return Jet(k * self.value, k * self.dx, k * self.dxx, k * self.dt)

    def heat(self, diffusion: float = 1.0) -> FloatArray:
        """∂t - diffusion·∂xx."""
        return self.dt - diffusion * self.dxx

    def put(self, mask: np.ndarray, other: Jet) -> None:
        self.value[mask] = other.value
        self.dx[mask] = other.dx
        self.dxx[mask] = other.dxx
        self.dt[mask] = other.dt


class BuildingBlock(ABC):
    """A space-time function with analytic or ODE-backed derivatives."""

    kind: ClassVar[str]

    @abstractmethod
    def jet(self, t: float, x: FloatArray) -> Jet: ...

    def __call__(self, t: float, x: FloatArray | float) -> FloatArray:
        return self.jet(t, np.atleast_1d(np.asarray(x, dtype=float))).value

    def at(self, t: float, x: float) -> float:
        return float(self(t, x)[0])

    def parameters(self) -> dict[str, float]:
        return {}


@dataclass(frozen=True, kw_only=True)
class TravelingBlock(BuildingBlock):
    """A profile g evaluated at ξ = x - speed·t - shift."""

    speed: float = 0.0
    shift: float = 0.0

    @abstractmethod
    def profile(self, xi: FloatArray) -> Profile:
        """Return g, g', g'' at ξ."""

    def moving(self, speed: float, shift: float = 0.0) -> TravelingBlock:
        return replace(self, speed=speed, shift=shift)

    def frame(self, t: float, x: FloatArray) -> FloatArray:
        return x - self.speed * t - self.shift

    def jet(self, t: float, x: FloatArray) -> Jet:
        g, g1, g2 = self.profile(self.frame(t, x))
        return Jet(g, g1, g2, -self.speed * g1)

    def value_at(self, xi: float) -> float:
        """Profile value at a single frame coordinate."""
        return float(self.profile(np.array([xi], dtype=float))[0][0])

    def slope_at(self, xi: float) -> float:
        return float(self.profile(np.array([xi], dtype=float))[1][0])

    def level_point(self, level: float, lo: float = -10.0, hi: float = 10.0) -> float:
        """Frame coordinate where a monotone profile takes the value ``level``."""
        return _solve_level(
            lambda z: self.value_at(z) - level, lo, hi, f"{self.kind} level {level:g}"
        )

    def parameters(self) -> dict[str, float]:
        return {"speed": self.speed, "shift": self.shift}


def _solve_level(
    g: Callable[[float], float], lo: float, hi: float, what: str, grow: float = 2.0
) -> float:
    """Root of a monotone scalar function, widening [lo, hi] until it brackets."""
    g_lo, g_hi = g(lo), g(hi)
    for _ in range(60):
        if g_lo * g_hi <= 0:
            return float(brentq(g, lo, hi, xtol=ROOT_XTOL))
        width = hi - lo
        lo, hi = lo - grow * width, hi + grow * width
        g_lo, g_hi = g(lo), g(hi)
    raise NoConvergence(f"{what}: no sign change found")


# =============================================================================
# KPP fronts (χ_c and π_{δ,c})
# =============================================================================


@dataclass(frozen=True, eq=False)
class KppFront:
    """Decreasing front of -dU'' - cU' = ρU(K - U), normalized by U(0) = K/2.

    Integrated in the log variables y = ln U, q = U'/U, starting next to
    the upper state along its unstable direction, so tails stay resolved far
    below machine epsilon. Left of the integration start the front is
    continued by its linearization at K; right of the end, y is extended
    linearly with the final slope.
    """

    c: float
    d: float
    rho: float
    level: float
    solution: Any = field(repr=False)
    offset: float
    span: float
    start_gap: float
    rise: float
    tail_y: float
    tail_q: float

    def log_profile(self, xi: FloatArray) -> tuple[FloatArray, FloatArray]:
        """y = ln U and q = U'/U at ξ."""
        s = np.asarray(xi, dtype=float) + self.offset
        y, q = np.empty_like(s), np.empty_like(s)
        left, right = s < 0.0, s > self.span
        mid = ~(left | right)
        if np.any(left):
            e = self.start_gap * np.exp(self.rise * s[left])
            y[left] = np.log(self.level - e)
            q[left] = -self.rise * e / (self.level - e)
        if np.any(mid):
            z = self.solution(s[mid])
            y[mid], q[mid] = z[0], z[1]
        if np.any(right):
            y[right] = self.tail_y + self.tail_q * (s[right] - self.span)
            q[right] = self.tail_q
        return y, q

    def evaluate(self, xi: FloatArray) -> Profile:
        y, q = self.log_profile(xi)
        u = np.exp(y)
        du = q * u
        ddu = -(self.c * du + self.rho * u * (self.level - u)) / self.d
        return u, du, ddu

    def inverse(self, value: float) -> float:
        """ξ with U(ξ) = value, for value in (0, K)."""
        if not 0.0 < value < self.level:
            raise DomainError(f"front level {value:g} outside (0, {self.level:g})")
        target = math.log(value)
        return _solve_level(
            lambda z: float(self.log_profile(np.array([z]))[0][0]) - target,
            -10.0,
            10.0,
            "front inverse",
        )


def kpp_front(c: float, d: float, rho: float, level: float) -> KppFront:
    """Integrate the KPP front of speed c for -dU'' - cU' = ρU(K - U).

    Raises:
        DomainError: If c is below the minimal speed 2√(dρK).
        NoConvergence: If the integration fails.
    """
    disc = c * c - 4.0 * d * rho * level
    if disc < -1e-12 * c * c:
        floor = 2.0 * math.sqrt(d * rho * level)
        raise DomainError(f"front speed c={c:g} below 2√(dρK)={floor:g}")
    slow = (c - math.sqrt(max(disc, 0.0))) / (2.0 * d)
    rise = (math.sqrt(c * c + 4.0 * d * rho * level) - c) / (2.0 * d)
    span = max(200.0, 600.0 / slow)
    gap = KPP_START * level

    def rhs(_s: float, z: FloatArray) -> list[float]:
        y, q = z
        return [q, -q * q - (c * q + rho * (level - math.exp(y))) / d]

    y0 = [math.log(level - gap), -rise * gap / (level - gap)]
    sol = solve_ivp(
        rhs, (0.0, span), y0, method="DOP853", rtol=1e-11, atol=1e-12, dense_output=True
    )
    if not sol.success:
        raise NoConvergence(f"front integration at c={c:g} failed: {sol.message}")
    target = math.log(level / 2.0)
    if sol.y[0, -1] > target:
        raise NoConvergence(f"front at c={c:g} never reached half level")
    offset = float(brentq(lambda s: sol.sol(s)[0] - target, 0.0, span, xtol=ROOT_XTOL))
    logger.debug(
        f"KPP front c={c:g} K={level:g}: half level at s={offset:.6g}, span {span:g}"
    )
    return KppFront(
        c,
        d,
        rho,
        level,
        sol.sol,
        offset,
        span,
        gap,
        rise,
        float(sol.y[0, -1]),
        float(sol.y[1, -1]),
    )


@dataclass(frozen=True, kw_only=True, eq=False)
class ChiBlock(TravelingBlock):
    """χ_c: front of u_t - u_xx = u((1-a)/2 - u) with χ(0) = (1-a)/4."""

    kind: ClassVar[str] = "chi"
    front: KppFront = field(repr=False)

    def profile(self, xi: FloatArray) -> Profile:
        return self.front.evaluate(xi)

    def log_value(self, xi: FloatArray) -> FloatArray:
        return self.front.log_profile(xi)[0]

    def parameters(self) -> dict[str, float]:
        return {"c": self.front.c, "level": self.front.level, **super().parameters()}


def chi_block(c: float, a: float) -> ChiBlock:
    return ChiBlock(front=kpp_front(c, 1.0, 1.0, (1.0 - a) / 2.0), speed=c)


@dataclass(frozen=True, kw_only=True, eq=False)
class PiBlock(TravelingBlock):
    """π_{δ,c,h}(ξ) = π_{δ,c}(ξ) + hξ, π_{δ,c} the front of v_t - dv_xx = rv(1-δ-v)."""

    kind: ClassVar[str] = "pi_h"
    front: KppFront = field(repr=False)
    h: float = 0.0

    @property
    def window(self) -> float:
        """Half-width √(c/(rh)) of the interval where π_h is a sub-solution."""
        if self.h <= 0:
            return math.inf
        return math.sqrt(self.front.c / (self.front.rho * self.h))

    def profile(self, xi: FloatArray) -> Profile:
        u, du, ddu = self.front.evaluate(xi)
        return u + self.h * xi, du + self.h, ddu

    def _turning_point(self, lo: float, hi: float) -> float:
        return float(brentq(lambda z: self.slope_at(z), lo, hi, xtol=ROOT_XTOL))

    def peak(self) -> tuple[float, float]:
        """Maximizer and maximum of π_h on [-window, 0]."""
        lo = -self.window
        if self.slope_at(lo) <= 0:
            return lo, self.value_at(lo)
        if self.slope_at(0.0) >= 0:
            return 0.0, self.value_at(0.0)
        z = self._turning_point(lo, 0.0)
        return z, self.value_at(z)

    def trough(self) -> tuple[float, float]:
        """Local minimizer of π_h right of its peak, capped at the window."""
        hi = self.window
        if self.slope_at(hi) <= 0:
            return hi, self.value_at(hi)
        z = self._turning_point(0.0, hi)
        return z, self.value_at(z)

    def parameters(self) -> dict[str, float]:
        return {
            "c": self.front.c,
            "level": self.front.level,
            "h": self.h,
            **super().parameters(),
        }


def pi_block(c: float, p: ModelParams, delta: float, h: float = 0.0) -> PiBlock:
    """π_{δ,c,h} moving at speed c.

    Raises:
        DomainError: If c < 2√(r(1-δ)d) or h < 0.
    """
    if h < 0:
        raise DomainError(f"pi block needs h ≥ 0, got {h}")
    return PiBlock(front=kpp_front(c, p.d, p.r, 1.0 - delta), h=h, speed=c)


def h_star(c: float, p: ModelParams, delta: float) -> float:
    """Largest h with max of π_{δ,c,h} over [-√(c/(rh)), 0] at least 1-2δ.

    Raises:
        DomainError: If c ≤ 2√(rd) or δ is not in (0, 1/2).
        NoConvergence: If no such h can be bracketed.
    """
    if not c > p.kpp_v_speed:
        raise DomainError(f"h_star needs c > 2√(rd)={p.kpp_v_speed:g}, got {c:g}")
    if not 0.0 < delta < 0.5:
        raise DomainError(f"h_star needs δ in (0, 1/2), got {delta}")
    base = pi_block(c, p, delta)
    level = 1.0 - 2.0 * delta

    def gap(log_h: float) -> float:
        return replace(base, h=math.exp(log_h)).peak()[1] - level

    lo, hi = math.log(1e-10), math.log(1e-4)
    if gap(lo) <= 0:
        raise NoConvergence("h_star: π_h peak below 1-2δ even for h = 1e-10")
    while gap(hi) > 0:
        hi += math.log(10.0)
        if hi > 0:
            raise NoConvergence("h_star: π_h peak stays above 1-2δ up to h = 1")
    hs = math.exp(brentq(gap, lo, hi, xtol=1e-10))
    pi = replace(base, h=hs)
    z, top = pi.peak()
    if not top > max(pi.value_at(0.0), pi.value_at(-pi.window)):
        logger.warning(f"h_star={hs:.4g}: maximum of π_h sits on the window boundary")
    logger.info(f"h_star(c={c:g}, δ={delta:g}) = {hs:.6e}, peak at ξ={z:.4g}")
    return hs


# =============================================================================
# Dirichlet bumps (ω_{δ,R} and α_l)
# =============================================================================


def principal_eigenvalue(length: float, d: float, drift: float, growth: float) -> float:
    """Principal Dirichlet eigenvalue of -dw'' - drift·w' - growth·w on an interval.

    Constant coefficients give d(π/ℓ)² + drift²/(4d) - growth.
    """
    return d * (math.pi / length) ** 2 + drift * drift / (4.0 * d) - growth


def existence_threshold(d: float, drift: float, growth: float) -> float:
    """Shortest interval with a positive Dirichlet solution at linear rate ``growth``.

    It is the length π√(d/(growth - drift²/4d)) where the principal
    eigenvalue changes sign.

    Raises:
        DomainError: If growth ≤ drift²/(4d), so no interval is long enough.
    """
    net = growth - drift * drift / (4.0 * d)
    if net <= 0:
        raise DomainError(
            f"no positive solution on any interval: growth {growth:g} ≤ drift²/4d"
        )
    return math.pi * math.sqrt(d / net)


def _solve_bump(
    left: float, right: float, d: float, drift: float, rho: float, level: float
) -> tuple[Any, float, float]:
    """Solve -dw'' - drift·w' = ρw(K - w), w(left) = w(right) = 0.

    Returns the dense solution and the location and value of its maximum.

    Raises:
        NoConvergence: If solve_bvp fails or only finds a trivial or
            sign-changing solution.
    """
    x = np.linspace(left, right, 401)
    y0 = level * np.tanh(x - left) * np.tanh(right - x)
    guess = np.vstack([y0, np.gradient(y0, x)])

    def fun(_x: FloatArray, y: FloatArray) -> FloatArray:
        return np.vstack([y[1], -(drift * y[1] + rho * y[0] * (level - y[0])) / d])

    def bc(ya: FloatArray, yb: FloatArray) -> FloatArray:
        return np.array([ya[0], yb[0]])

    res = solve_bvp(fun, bc, x, guess, tol=BVP_TOL, max_nodes=200_000)
    if not res.success:
        raise NoConvergence(f"bump on [{left:g}, {right:g}]: {res.message}")
    fine = np.linspace(left, right, _PEAK_SAMPLES)
    vals = res.sol(fine)[0]
    if vals.min() < -1e-8:
        raise NoConvergence(f"bump on [{left:g}, {right:g}] changes sign")
    i = int(np.argmax(vals))
    if vals[i] < 1e-6:
        raise NoConvergence(f"only the trivial solution on [{left:g}, {right:g}]")
    a, b = fine[max(i - 1, 0)], fine[min(i + 1, fine.size - 1)]
    opt = minimize_scalar(lambda z: -res.sol(z)[0], bounds=(a, b), method="bounded")
    return res.sol, float(opt.x), float(-opt.fun)


@dataclass(frozen=True, kw_only=True, eq=False)
class BumpBlock(TravelingBlock):
    """Positive solution of -dw'' - drift·w' = ρw(K - w) on (left, right), else 0."""

    kind: ClassVar[str] = "bump"
    left: float
    right: float
    d: float
    drift: float
    rho: float
    level: float
    solution: Any = field(repr=False)
    peak_x: float
    peak_value: float

    def profile(self, xi: FloatArray) -> Profile:
        inside = (xi > self.left) & (xi < self.right)
        y = self.solution(np.clip(xi, self.left, self.right))
        w = np.where(inside, y[0], 0.0)
        dw = np.where(inside, y[1], 0.0)
        reaction = self.rho * w * (self.level - w)
        ddw = np.where(inside, -(self.drift * dw + reaction) / self.d, 0.0)
        return w, dw, ddw

    def parameters(self) -> dict[str, float]:
        return {
            "left": self.left,
            "right": self.right,
            "drift": self.drift,
            "peak_x": self.peak_x,
            "peak_value": self.peak_value,
            **super().parameters(),
        }


class OmegaBlock(BumpBlock):
    kind: ClassVar[str] = "omega"


class AlphaBlock(BumpBlock):
    kind: ClassVar[str] = "alpha"


def default_omega_drift(p: ModelParams, delta: float) -> float:
    return 2.0 * math.sqrt(p.r * (1.0 - delta) * p.d) - delta


def omega_block(
    p: ModelParams, delta: float, radius: float, drift: float | None = None
) -> OmegaBlock:
    """ω_{δ,R} on (-R, R), drift defaulting to 2√(r(1-δ)d) - δ."""
    if drift is None:
        drift = default_omega_drift(p, delta)
    sol, z, top = _solve_bump(-radius, radius, p.d, drift, p.r, 1.0 - delta)
    return OmegaBlock(
        left=-radius,
        right=radius,
        d=p.d,
        drift=drift,
        rho=p.r,
        level=1.0 - delta,
        solution=sol,
        peak_x=z,
        peak_value=top,
    )


def alpha_block(a: float, length: float) -> AlphaBlock:
    """α_l on (0, l), the positive solution of -α'' = α(1-a-α)."""
    sol, z, top = _solve_bump(0.0, length, 1.0, 0.0, 1.0, 1.0 - a)
    return AlphaBlock(
        left=0.0,
        right=length,
        d=1.0,
        drift=0.0,
        rho=1.0,
        level=1.0 - a,
        solution=sol,
        peak_x=z,
        peak_value=top,
    )


def _shortest_reaching(
    build: Callable[[float], BumpBlock], threshold: float, level: float, what: str
) -> float:
    """Smallest size above threshold whose bump reaches ``level``."""

    def gap(size: float) -> float:
        try:
            return build(size).peak_value - level
        except NoConvergence:
            return -level

    lo = 1.05 * threshold
    if gap(lo) >= 0:
        return lo
    hi = 2.0 * threshold
    for _ in range(12):
        if gap(hi) > 0:
            return float(brentq(gap, lo, hi, xtol=1e-6))
        lo, hi = hi, 2.0 * hi
    raise NoConvergence(f"{what}: bump never reaches {level:g}")


def min_radius_omega(
    p: ModelParams, delta: float, drift: float | None = None
) -> tuple[float, float]:
    """(R_ω, R_δ): existence radius of ω_{δ,R} and the radius where max ω ≥ 1-2δ.

    Raises:
        DomainError: If δ is not in (0, 1).
        NoConvergence: If R_δ cannot be bracketed.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError(f"min_radius_omega needs δ in (0, 1), got {delta}")
    if drift is None:
        drift = default_omega_drift(p, delta)
    r_omega = existence_threshold(p.d, drift, p.r * (1.0 - delta)) / 2.0
    r_delta = _shortest_reaching(
        lambda radius: omega_block(p, delta, radius, drift),
        r_omega,
        1.0 - 2.0 * delta,
        "R_δ",
    )
    logger.info(
        f"omega radii at δ={delta:g}, drift {drift:.6g}: "
        f"R_ω={r_omega:.6g}, R_δ={r_delta:.6g}"
    )
    return r_omega, r_delta


def min_length_alpha(a: float) -> float:
    """L_α, the shortest interval carrying α_l."""
    if not 0.0 < a < 1.0:
        raise DomainError(f"min_length_alpha needs a in (0, 1), got {a}")
    return existence_threshold(1.0, 0.0, 1.0 - a)


def plateau_length_alpha(a: float) -> float:
    """L, the shortest l with max α_l ≥ (1-a)/2."""
    l_alpha = min_length_alpha(a)
    return _shortest_reaching(
        lambda l: alpha_block(a, l), l_alpha, (1.0 - a) / 2.0, "L"
    )


# =============================================================================
# The wave pair (φ̄_δ, ψ̲_δ)
# =============================================================================


@dataclass(frozen=True, kw_only=True, eq=False)
class WaveBlock(TravelingBlock):
    """One component of a traveling-wave profile from the waves module.

    Inside half the truncation the components are cubic splines of the
    Newton solution. Where a component falls below the tail floor it is
    continued by its exponential tail, and beyond half the truncation the
    plateaus are held constant.
    """

    kind: ClassVar[str] = "wave"
    wave: WaveProfile = field(repr=False)
    component: Literal["phi", "psi"]
    phi_spline: CubicSpline = field(repr=False)
    psi_spline: CubicSpline = field(repr=False)
    core: float
    phi_anchor: float
    psi_anchor: float
    phi_rate: float
    psi_rate: float

    def pair(
        self, xi: FloatArray
    ) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
        xc = np.clip(xi, -self.core, self.core)
        phi, dphi = self.phi_spline(xc), self.phi_spline(xc, 1)
        psi, dpsi = self.psi_spline(xc), self.psi_spline(xc, 1)
        dphi = np.where(xi < -self.core, 0.0, dphi)
        dpsi = np.where(xi > self.core, 0.0, dpsi)

        tail = xi > self.phi_anchor
        if np.any(tail):
            top = float(self.phi_spline(self.phi_anchor))
            phi[tail] = top * np.exp(-self.phi_rate * (xi[tail] - self.phi_anchor))
            dphi[tail] = -self.phi_rate * phi[tail]
        tail = xi < self.psi_anchor
        if np.any(tail):
            top = float(self.psi_spline(self.psi_anchor))
            psi[tail] = top * np.exp(self.psi_rate * (xi[tail] - self.psi_anchor))
            dpsi[tail] = self.psi_rate * psi[tail]
        return phi, dphi, psi, dpsi

    def profile(self, xi: FloatArray) -> Profile:
        w, p = self.wave, self.wave.params
        phi, dphi, psi, dpsi = self.pair(np.asarray(xi, dtype=float))
        if self.component == "phi":
            ddphi = -w.c * dphi - phi * (1.0 + w.delta - phi - p.a * psi)
            return phi, dphi, ddphi
        reaction = p.r * psi * (1.0 - 2.0 * w.delta - psi - p.b * phi)
        ddpsi = -(w.c * dpsi + reaction) / p.d
        return psi, dpsi, ddpsi

    def parameters(self) -> dict[str, float]:
        return {"c": self.wave.c, "delta": self.wave.delta, **super().parameters()}


def psi_tail_band(w: WaveProfile) -> tuple[float, float]:
    """Minus-side ξ band with WAVE_TAIL_FLOOR ≤ ψ ≤ WAVE_TAIL_FIT_TOP, off the edge."""
    edge = (1.0 - EDGE_FRACTION) * w.truncation
    inside = (w.xi <= 0) & (w.xi >= -edge)
    band = inside & (w.psi >= WAVE_TAIL_FLOOR) & (w.psi <= WAVE_TAIL_FIT_TOP)
    if not np.any(band):
        raise DomainError(
            f"ψ never enters [{WAVE_TAIL_FLOOR:g}, {WAVE_TAIL_FIT_TOP:g}] on ξ ≤ 0"
        )
    xs = w.xi[band]
    return float(xs[0]), float(xs[-1])


def wave_pair_blocks(w: WaveProfile) -> tuple[WaveBlock, WaveBlock]:
    """φ̄_δ and ψ̲_δ as blocks moving at the wave speed."""
    core = 0.5 * w.truncation
    inner = np.abs(w.xi) <= core
    xi, phi, psi = w.xi[inner], w.phi[inner], w.psi[inner]
    phi_spline, psi_spline = CubicSpline(xi, phi), CubicSpline(xi, psi)

    low = np.flatnonzero((xi >= 0) & (phi < WAVE_TAIL_FLOOR))
    phi_anchor = float(xi[low[0]]) if low.size else core
    low = np.flatnonzero((xi <= 0) & (psi < WAVE_TAIL_FLOOR))
    psi_anchor = float(xi[low[-1]]) if low.size else -core

    common = dict(
        wave=w,
        phi_spline=phi_spline,
        psi_spline=psi_spline,
        core=core,
        phi_anchor=phi_anchor,
        psi_anchor=psi_anchor,
        phi_rate=phi_decay_delta(w.c, w.params.a, w.delta),
        psi_rate=measure_decay(w, "minus", psi_tail_band(w)),
        speed=w.c,
    )
    phi_block = WaveBlock(component="phi", **common)  # type: ignore[arg-type]
    psi_block = WaveBlock(component="psi", **common)  # type: ignore[arg-type]
    return phi_block, psi_block


# =============================================================================
# Closed-form blocks
# =============================================================================


def theta_rates(c: float, p: ModelParams, delta: float) -> tuple[float, float]:
    """Roots λθ± of dλ² + cλ - r(b-1+δ) = 0."""
    root = math.sqrt(c * c + 4.0 * p.r * p.d * (p.b - 1.0 + delta))
    return (root - c) / (2.0 * p.d), (-root - c) / (2.0 * p.d)


@dataclass(frozen=True, kw_only=True)
class ThetaBlock(TravelingBlock):
    """θ_{δ,c,A}(ξ) = A e^{λ+(ξ-ξθ)} - e^{λ-(ξ-ξθ)}, ξθ = ln A/(λ+ - λ-), so θ(0) = 0.

    Solves -dθ'' - cθ' = rθ(1-δ-b). Stored through ln A.
    """

    kind: ClassVar[str] = "theta"
    lam_plus: float
    lam_minus: float
    log_a: float

    @property
    def xi_theta(self) -> float:
        return self.log_a / (self.lam_plus - self.lam_minus)

    def profile(self, xi: FloatArray) -> Profile:
        lp, lm, xt = self.lam_plus, self.lam_minus, self.xi_theta
        with np.errstate(over="ignore"):
            hi = np.exp(lp * xi - lm * xt)
            lo = np.exp(lm * (xi - xt))
        return hi - lo, lp * hi - lm * lo, lp * lp * hi - lm * lm * lo

    def parameters(self) -> dict[str, float]:
        return {
            "lam_plus": self.lam_plus,
            "lam_minus": self.lam_minus,
            "log_A": self.log_a,
            "xi_theta": self.xi_theta,
            **super().parameters(),
        }


def theta_block(c: float, p: ModelParams, delta: float, log_a: float) -> ThetaBlock:
    lp, lm = theta_rates(c, p, delta)
    return ThetaBlock(lam_plus=lp, lam_minus=lm, log_a=log_a, speed=c)


@dataclass(frozen=True, kw_only=True)
class BetaBlock(TravelingBlock):
    """β_{c,B,η}(ξ) = max(0, e^{-λv(ξ+ξβ)} - Kβ e^{-(λv+η)(ξ+ξβ)}), ξβ = ln Kβ/η."""

    kind: ClassVar[str] = "beta"
    lam: float
    eta: float
    log_k: float
    log_b: float

    @property
    def xi_beta(self) -> float:
        return self.log_k / self.eta

    def profile(self, xi: FloatArray) -> Profile:
        lam, eta = self.lam, self.eta
        pos = xi > 0
        with np.errstate(over="ignore", invalid="ignore"):
            base = np.exp(-lam * (xi + self.xi_beta))
            e = np.exp(-eta * xi)
            g = base * -np.expm1(-eta * xi)
            g1 = base * (-lam + (lam + eta) * e)
            g2 = base * (lam * lam - (lam + eta) ** 2 * e)
        return np.where(pos, g, 0.0), np.where(pos, g1, 0.0), np.where(pos, g2, 0.0)

    def peak(self) -> tuple[float, float]:
        """Maximizer and maximum of β."""
        lam, eta = self.lam, self.eta
        z = math.log((lam + eta) / lam) / eta
        return z, self.value_at(z)

    def parameters(self) -> dict[str, float]:
        return {
            "lam_v": self.lam,
            "eta": self.eta,
            "log_K": self.log_k,
            "log_B": self.log_b,
            "xi_beta": self.xi_beta,
            **super().parameters(),
        }


def beta_block(c: float, p: ModelParams, eta: float, log_b: float) -> BetaBlock:
    """β_{c,B,η} with B = e^{log_b} (log_b = -inf gives B = 0).

    Raises:
        DomainError: If c ≤ 2√(rd) or η is outside (0, √(c²-4rd)/d).
    """
    if not c > p.kpp_v_speed:
        raise DomainError(f"beta block needs c > 2√(rd)={p.kpp_v_speed:g}, got {c:g}")
    root = math.sqrt(c * c - 4.0 * p.r * p.d)
    if not 0.0 < eta < root / p.d:
        raise DomainError(f"beta block needs η in (0, {root / p.d:g}), got {eta:g}")
    b_val = math.exp(log_b) if log_b > -700 else 0.0
    k = p.r * (1.0 + p.b * b_val) / (eta * (root - p.d * eta))
    return BetaBlock(
        lam=lambda_v(c, p.r, p.d), eta=eta, log_k=math.log(k), log_b=log_b, speed=c
    )


@dataclass(frozen=True, kw_only=True)
class ExponentialBlock(TravelingBlock):
    """e^{-rate·ξ}."""

    kind: ClassVar[str] = "exponential"
    rate: float

    def profile(self, xi: FloatArray) -> Profile:
        with np.errstate(over="ignore"):
            g = np.exp(-self.rate * xi)
        return g, -self.rate * g, self.rate * self.rate * g

    def parameters(self) -> dict[str, float]:
        return {"rate": self.rate, **super().parameters()}


def exponential_block(
    rate: float, speed: float = 0.0, shift: float = 0.0
) -> ExponentialBlock:
    if not rate > 0:
        raise DomainError(f"exponential block needs a positive rate, got {rate}")
    return ExponentialBlock(rate=rate, speed=speed, shift=shift)


@dataclass(frozen=True)
class WbarBlock(BuildingBlock):
    """w̄_{δ,c,c̃}(t, x) = e^{-λδ(c)(c̃-c)t} e^{-Λδ(c,c̃)(x - c̃t - shift)}.

    Solves ∂t w̄ - ∂xx w̄ = w̄ exactly.
    """

    kind: ClassVar[str] = "wbar"
    c: float
    ct: float
    lam: float
    big: float
    shift: float = 0.0

    def log_value(self, t: float, x: FloatArray) -> FloatArray:
        s = x - self.ct * t - self.shift
        return -self.lam * (self.ct - self.c) * t - self.big * s

    def jet(self, t: float, x: FloatArray) -> Jet:
        with np.errstate(over="ignore"):
            w = np.exp(self.log_value(t, x))
        rate_t = -self.lam * (self.ct - self.c) + self.big * self.ct
        return Jet(w, -self.big * w, self.big * self.big * w, rate_t * w)

    def parameters(self) -> dict[str, float]:
        return {
            "c": self.c,
            "ct": self.ct,
            "lam": self.lam,
            "Lambda": self.big,
            "shift": self.shift,
        }


def wbar_block(
    c: float, ct: float, a: float, delta: float = 0.0, shift: float = 0.0
) -> WbarBlock:
    """w̄_{δ,c,c̃}; needs c ≥ 2√(1-a_δ) and c̃ ≥ max(c, f_δ(c))."""
    return WbarBlock(c, ct, lambda_u(c, a, delta), big_lambda(c, ct, a, delta), shift)


@dataclass(frozen=True)
class WunderBlock(BuildingBlock):
    """w̲_{c,c̃,A,η}(t, x) = e^{-λ(c)(c̃-c)t} max(0, e^{-Λs'} - Kw e^{-(Λ+η)s'}).

    Here s' = x - c̃t - shift + xw and xw = ln Kw/η, so w̲ vanishes exactly
    at x = c̃t + shift.
    """

    kind: ClassVar[str] = "wunder"
    c: float
    ct: float
    lam: float
    big: float
    eta: float
    log_k: float
    amplitude: float
    shift: float = 0.0

    @property
    def x_w(self) -> float:
        return self.log_k / self.eta

    @property
    def peak_offset(self) -> float:
        """X_w, the maximizer of w̲ relative to c̃t + shift."""
        return math.log((self.big + self.eta) / self.big) / self.eta

    def log_peak(self, t: float) -> float:
        """ln of the maximum of w̲(t, ·)."""
        z = self.peak_offset
        return (
            -self.lam * (self.ct - self.c) * t
            - self.big * (z + self.x_w)
            + math.log(-math.expm1(-self.eta * z))
        )

    def jet(self, t: float, x: FloatArray) -> Jet:
        s = x - self.ct * t - self.shift
        pos = s > 0
        amp = math.exp(-self.lam * (self.ct - self.c) * t)
        big, eta = self.big, self.eta
        with np.errstate(over="ignore", invalid="ignore"):
            base = np.exp(-big * (s + self.x_w))
            e = np.exp(-eta * s)
            g = np.where(pos, base * -np.expm1(-eta * s), 0.0)
            g1 = np.where(pos, base * (-big + (big + eta) * e), 0.0)
            g2 = np.where(pos, base * (big * big - (big + eta) ** 2 * e), 0.0)
        return Jet(
            amp * g,
            amp * g1,
            amp * g2,
            amp * (-self.lam * (self.ct - self.c) * g - self.ct * g1),
        )

    def parameters(self) -> dict[str, float]:
        return {
            "c": self.c,
            "ct": self.ct,
            "Lambda": self.big,
            "eta": self.eta,
            "log_Kw": self.log_k,
            "x_w": self.x_w,
            "X_w": self.peak_offset,
            "A": self.amplitude,
            "shift": self.shift,
        }


def wunder_block(
    c: float, ct: float, a: float, amplitude: float, eta: float, shift: float = 0.0
) -> WunderBlock:
    """w̲_{c,c̃,A,η} with Kw = max(1, (1+aA)/(η(c̃-η-2Λ))).

    Raises:
        DomainError: If η is outside (0, min(Λ, √(c̃² - 4(λ(c)(c̃-c)+1)))).
    """
    lam = lambda_u(c, a)
    big = big_lambda(c, ct, a)
    disc = ct * ct - 4.0 * (lam * (ct - c) + 1.0)
    top = min(big, math.sqrt(max(disc, 0.0)))
    if not 0.0 < eta < top:
        raise DomainError(f"wunder block needs η in (0, {top:g}), got {eta:g}")
    k = max(1.0, (1.0 + a * amplitude) / (eta * (ct - eta - 2.0 * big)))
    return WunderBlock(c, ct, lam, big, eta, math.log(k), amplitude, shift)


@dataclass(frozen=True)
class ZBlock(BuildingBlock):
    """z_{δ,c,c̃}: e^{-λ(c)(c̃-c)t} e^{-(c̃/2)s} sin(πs/(2Rz)) on s ∈ [0, 2Rz].

    Here s = x - c̃t - shift. Solves ∂t z - ∂xx z = (1-δ)z; ``scale``
    multiplies the whole block.
    """

    kind: ClassVar[str] = "z"
    c: float
    ct: float
    lam: float
    delta: float
    radius: float
    scale: float = 1.0
    shift: float = 0.0

    @property
    def peak_offset(self) -> float:
        """X_z, the maximizer of z(0, ·) relative to its left end."""
        angle = math.atan(math.pi / (self.ct * self.radius))
        return 2.0 * self.radius / math.pi * angle

    def shape(self, s: float) -> float:
        """Unscaled z(0, ·) at offset s from the left end."""
        if not 0.0 < s < 2.0 * self.radius:
            return 0.0
        wave = math.sin(math.pi * s / (2.0 * self.radius))
        return math.exp(-self.ct * s / 2.0) * wave

    def jet(self, t: float, x: FloatArray) -> Jet:
        s = x - self.ct * t - self.shift
        inside = (s > 0) & (s < 2.0 * self.radius)
        k = math.pi / (2.0 * self.radius)
        half = self.ct / 2.0
        amp = self.scale * math.exp(-self.lam * (self.ct - self.c) * t)
        with np.errstate(over="ignore", invalid="ignore"):
            e = np.exp(-half * s)
            sn, cs = np.sin(k * s), np.cos(k * s)
            g = np.where(inside, e * sn, 0.0)
            g1 = np.where(inside, e * (-half * sn + k * cs), 0.0)
            g2 = np.where(
                inside, e * ((half * half - k * k) * sn - self.ct * k * cs), 0.0
            )
        return Jet(
            amp * g,
            amp * g1,
            amp * g2,
            amp * (-self.lam * (self.ct - self.c) * g - self.ct * g1),
        )

    def parameters(self) -> dict[str, float]:
        return {
            "c": self.c,
            "ct": self.ct,
            "delta": self.delta,
            "R_z": self.radius,
            "X_z": self.peak_offset,
            "scale": self.scale,
            "shift": self.shift,
        }


def z_radius(c: float, ct: float, a: float, delta: float) -> float:
    """R_z = π/√(-c̃² + 4(λ(c)(c̃-c) + 1 - δ))."""
    bound = z_delta_bound(c, ct, a)
    if not delta < bound:
        raise DomainError(f"δ={delta:g} too large for the z block, bound {bound:g}")
    return math.pi / math.sqrt(
        -ct * ct + 4.0 * (lambda_u(c, a) * (ct - c) + 1.0 - delta)
    )


def z_block(
    c: float, ct: float, a: float, delta: float, scale: float = 1.0, shift: float = 0.0
) -> ZBlock:
    """z_{δ,c,c̃}.

    Raises:
        DomainError: If c̃ is outside (f(c) - 4√a, f(c)) or δ is too large.
    """
    fc = f_of(c, a)
    if not fc - 4.0 * math.sqrt(a) < ct < fc:
        low = fc - 4.0 * math.sqrt(a)
        raise DomainError(f"z block needs c̃ in ({low:g}, {fc:g}), got {ct:g}")
    return ZBlock(c, ct, lambda_u(c, a), delta, z_radius(c, ct, a, delta), scale, shift)


@dataclass(frozen=True)
class EigenpairBlock(BuildingBlock):
    """Dirichlet principal eigenpair of -dψ'' on (-4R, 4R): ψ = cos(πx/(8R)), else 0."""

    kind: ClassVar[str] = "eigenpair"
    radius: float
    d: float

    @property
    def eigenvalue(self) -> float:
        return self.d * math.pi**2 / (64.0 * self.radius**2)

    def jet(self, t: float, x: FloatArray) -> Jet:
        k = math.pi / (8.0 * self.radius)
        inside = np.abs(x) < 4.0 * self.radius
        g = np.where(inside, np.cos(k * x), 0.0)
        g1 = np.where(inside, -k * np.sin(k * x), 0.0)
        return Jet(g, g1, -k * k * g, np.zeros_like(g))

    def parameters(self) -> dict[str, float]:
        return {"R": self.radius, "d": self.d, "eigenvalue": self.eigenvalue}


def eigenpair_block(radius: float, d: float) -> EigenpairBlock:
    if not radius > 0 or not d > 0:
        raise DomainError(f"eigenpair needs R > 0 and d > 0, got R={radius}, d={d}")
    return EigenpairBlock(radius, d)


_BUILDERS: dict[str, Callable[..., BuildingBlock]] = {
    "chi": chi_block,
    "pi": pi_block,
    "pi_h": pi_block,
    "omega": omega_block,
    "alpha": alpha_block,
    "theta": theta_block,
    "beta": beta_block,
    "wbar": wbar_block,
    "wunder": wunder_block,
    "z": z_block,
    "eigenpair": eigenpair_block,
    "exponential": exponential_block,
}

BLOCK_KINDS = tuple(_BUILDERS)


def build_block(kind: str, **parameters: Any) -> BuildingBlock:
    """Build a block by kind name with the keyword parameters of its factory.

    Raises:
        DomainError: For an unknown kind or parameters outside its range.
    """
    try:
        builder = _BUILDERS[kind]
    except KeyError as e:
        raise DomainError(
            f"unknown block kind {kind!r}; expected one of {BLOCK_KINDS}"
        ) from e
    try:
        return builder(**parameters)
    except TypeError as e:
        raise DomainError(f"bad parameters for block {kind!r}: {e}") from e
