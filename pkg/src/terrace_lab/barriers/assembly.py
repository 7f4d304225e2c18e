"""Piecewise barrier pairs glued from building blocks.

Four constructions are provided:

* ``terrace_super``: super-solution pair (ū, v̲) following a propagating
  terrace with speeds c2 < c1, where v̲ ends in the π_h plateau and the β
  tail moving at c1.
* ``compact_super``: the same wave side, but v̲ ends in the compactly
  supported bump ω moving at c1^δ.
* ``terrace_sub``: sub-solution pair (u̲, v̄) whose u̲ is the χ front glued
  to the w̲ bump riding ahead of v̄'s exponential tail.
* ``nonexistence_sub``: compactly supported sub-solution u̲ = α | χ | z
  with v̄ an exponential moving at c̃.

The free translations of each construction are chosen constructively so
that every gluing holds on the finite horizon [0, T]. They are recorded in
``BarrierAssembly.constants``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

import numpy as np
from scipy.optimize import brentq

from ..config import (
    CERT_T_END,
    CERT_WINDOW_PAD,
    CONTINUITY_TOL,
    INTERFACE_GAP,
    KAPPA_TILDE,
)
from ..errors import (
    DeltaTooLarge,
    DomainError,
    HypothesisViolated,
    NoConvergence,
    NotAdmissible,
)
from ..model import FloatArray, Grid, ModelParams, StatePair
from ..speeds import (
    Admissibility,
    admissible,
    big_lambda,
    c_llw_delta,
    f_inverse,
    lambda_u,
    lambda_v,
    linear_determinacy,
    nonexistence_speeds,
    perturbed_speeds_compact,
    perturbed_speeds_terrace,
    z_delta_bound,
)
from ..waves import solve_profile
from .blocks import (
    BuildingBlock,
    ChiBlock,
    Jet,
    ThetaBlock,
    WaveBlock,
    WbarBlock,
    alpha_block,
    beta_block,
    chi_block,
    exponential_block,
    h_star,
    min_radius_omega,
    omega_block,
    pi_block,
    plateau_length_alpha,
    theta_block,
    theta_rates,
    wave_pair_blocks,
    wbar_block,
    wunder_block,
    z_block,
)
from .interfaces import (
    Bracket,
    InterfaceCurve,
    InterfaceId,
    Junction,
    crossing_interface,
    linear_interface,
)

logger = logging.getLogger(__name__)

_ORDER_SAMPLES = 21
_FIXED_POINT_ITER = 200
_AUX_KEYS = frozenset(
    {"kappa", "kappa_tilde", "h", "eta", "radius", "length", "c_llw", "c_llw_delta"}
)


class BarrierKind(str, Enum):
    TERRACE_SUPER = "terrace_super"
    TERRACE_SUB = "terrace_sub"
    COMPACT_SUPER = "compact_super"
    NONEXISTENCE_SUB = "nonexistence_sub"

    @property
    def is_super(self) -> bool:
        """Super pairs are (ū, v̲); sub pairs are (u̲, v̄)."""
        return self in (BarrierKind.TERRACE_SUPER, BarrierKind.COMPACT_SUPER)


@dataclass(frozen=True)
class Piece:
    """A block active on one region, optionally clamped from below or above."""

    name: str
    block: BuildingBlock
    floor: float | None = None
    cap: float | None = None

    def jet(self, t: float, x: FloatArray) -> Jet:
        j = self.block.jet(t, x)
        if self.floor is None and self.cap is None:
            return j
        value, dx, dxx, dt = j.value.copy(), j.dx.copy(), j.dxx.copy(), j.dt.copy()
        clamped = np.zeros(value.size, dtype=bool)
        if self.floor is not None:
            low = value < self.floor
            value[low] = self.floor
            clamped |= low
        if self.cap is not None:
            high = value > self.cap
            value[high] = self.cap
            clamped |= high
        dx[clamped] = dxx[clamped] = dt[clamped] = 0.0
        return Jet(value, dx, dxx, dt)


@dataclass(frozen=True)
class PiecewiseField:
    """Pieces ordered left to right, separated by interface curves."""

    pieces: tuple[Piece, ...]
    cuts: tuple[InterfaceCurve, ...] = ()

    def __post_init__(self) -> None:
        if len(self.cuts) != len(self.pieces) - 1:
            raise DomainError(
                f"{len(self.pieces)} pieces need {len(self.pieces) - 1} interfaces"
            )

    def cut_positions(self, t: float) -> FloatArray:
        return np.array([cut(t) for cut in self.cuts])

    def piece_index(self, t: float, x: FloatArray) -> np.ndarray:
        return np.searchsorted(self.cut_positions(t), x, side="right")

    def evaluate(self, t: float, x: FloatArray | float) -> Jet:
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        index = self.piece_index(t, xs)
        out = Jet.empty(xs.size)
        for i, piece in enumerate(self.pieces):
            mask = index == i
            if np.any(mask):
                out.put(mask, piece.jet(t, xs[mask]))
        return out

    def __call__(self, t: float, x: FloatArray | float) -> FloatArray:
        return self.evaluate(t, x).value

    def jumps(self, t: float) -> dict[str, float]:
        """|left - right| at every interface at time t."""
        out: dict[str, float] = {}
        for i, cut in enumerate(self.cuts):
            x = np.array([cut(t)])
            left = float(self.pieces[i].jet(t, x).value[0])
            right = float(self.pieces[i + 1].jet(t, x).value[0])
            out[cut.id.value] = abs(left - right)
        return out


@dataclass(frozen=True, eq=False)
class BarrierAssembly:
    """An assembled barrier pair and the constants it was built from."""

    which: BarrierKind
    u: PiecewiseField
    v: PiecewiseField
    params: ModelParams
    delta: float
    speeds: dict[str, float]
    constants: dict[str, float]
    horizon: float
    pad: float = CERT_WINDOW_PAD
    certificate: Any = field(default=None, repr=False)

    @property
    def interfaces(self) -> dict[InterfaceId, InterfaceCurve]:
        return {cut.id: cut for cut in (*self.u.cuts, *self.v.cuts)}

    def interface(self, interface_id: InterfaceId | str) -> InterfaceCurve:
        try:
            return self.interfaces[InterfaceId(interface_id)]
        except (KeyError, ValueError) as e:
            raise DomainError(
                f"{self.which.value} has no interface {interface_id!r}"
            ) from e

    def evaluate(self, t: float, x: FloatArray | float) -> tuple[Jet, Jet]:
        return self.u.evaluate(t, x), self.v.evaluate(t, x)

    def initial_fields(self, grid: Grid) -> StatePair:
        u, v = self.evaluate(0.0, grid.x)
        return StatePair(0.0, u.value, v.value, grid)

    def window(self, t_end: float | None = None) -> tuple[float, float]:
        """Window covering every interface on [0, t_end], padded on both sides."""
        t_end = self.horizon if t_end is None else t_end
        xs = [curve(t) for curve in self.interfaces.values() for t in (0.0, t_end)]
        return min(xs) - self.pad, max(xs) + self.pad

    def with_certificate(self, report: Any) -> BarrierAssembly:
        return replace(self, certificate=report)

    def summary(self) -> dict[str, Any]:
        return {
            "which": self.which.value,
            "params": self.params.as_dict(),
            "delta": self.delta,
            "speeds": dict(self.speeds),
            "constants": dict(self.constants),
            "horizon": self.horizon,
            "interfaces": {k.value: v.bracket_note for k, v in self.interfaces.items()},
        }


# =============================================================================
# Shared wave side of the super-solutions
# =============================================================================


@dataclass(frozen=True)
class _WaveSide:
    phi: WaveBlock
    psi: WaveBlock
    theta: ThetaBlock
    wbar: WbarBlock
    xi1: InterfaceCurve
    x2: InterfaceCurve
    drift2: float
    constants: dict[str, float]


def _wave_side(
    p: ModelParams,
    c: float,
    ct: float,
    delta: float,
    kappa: float,
    kappa_tilde: float,
    c_llw_d: float | None,
) -> _WaveSide:
    """θ | ψ̲_δ on the v side and φ̄_δ | w̄ on the u side, following the wave at c."""
    wave = solve_profile(c, p, delta, c_llw=c_llw_d)
    phi, psi = wave_pair_blocks(wave)

    eta1 = psi.level_point(kappa)
    ratio = psi.slope_at(eta1) / psi.value_at(eta1)
    m = (1.0 - kappa_tilde) * ratio
    lam_p, lam_m = theta_rates(c, p, delta)
    if not m > lam_p:
        raise HypothesisViolated(
            f"ψ'/ψ={ratio:.6g} at the κ-level leaves no room above "
            f"λθ+={lam_p:.6g}; lower κ"
        )
    spread = lam_p - lam_m
    xi1_theta = math.log1p(spread / (m - lam_p)) / spread
    log_gap = math.log(kappa) - math.log(math.expm1(spread * xi1_theta))
    x_theta = xi1_theta - log_gap / lam_m
    theta = theta_block(c, p, delta, spread * x_theta).moving(c, eta1 - xi1_theta)

    lam_d = lambda_u(c, p.a, delta)
    big_d = big_lambda(c, ct, p.a, delta)
    mu = phi.phi_rate
    if not big_d > mu:
        raise HypothesisViolated(f"Λδ={big_d:.6g} must exceed the φ̄ decay {mu:.6g}")
    target = delta / (2.0 * p.b)
    eta2 = phi.level_point(target)
    zeta2 = eta2 + math.log(target) / big_d
    wbar = wbar_block(c, ct, p.a, delta, shift=zeta2)
    drift2 = c + (big_d - lam_d) * (ct - c) / (big_d - mu)

    xi1 = linear_interface(InterfaceId.XI1, eta1, c, Junction.MAX, "ψ̲δ(η1) = κ")
    x2 = crossing_interface(
        InterfaceId.X2,
        phi,
        wbar,
        Bracket(eta1, c, eta2 + 100.0, max(drift2, ct)),
        Junction.MIN,
        "φ̄δ = w̄ between the κ-level of ψ̲δ and beyond the δ/2b-level of φ̄δ",
    )
    constants = {
        "kappa": kappa,
        "kappa_tilde": kappa_tilde,
        "eta1": eta1,
        "m": m,
        "lambda_theta_plus": lam_p,
        "lambda_theta_minus": lam_m,
        "xi1_theta": xi1_theta,
        "xi_theta": theta.xi_theta,  # type: ignore[attr-defined]
        "eta2": eta2,
        "zeta2": zeta2,
        "Lambda_delta": big_d,
        "lambda_delta": lam_d,
        "mu": mu,
        "x2_drift": drift2,
        "wave_residual": wave.residual,
        "wave_truncation": wave.truncation,
    }
    return _WaveSide(
        phi, psi, theta, wbar, xi1, x2, drift2, constants  # type: ignore[arg-type]
    )


def _times(horizon: float) -> FloatArray:
    return np.linspace(0.0, horizon, _ORDER_SAMPLES)


def _check_order(curves: list[InterfaceCurve], horizon: float) -> None:
    for t in _times(horizon):
        xs = [curve(float(t)) for curve in curves]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            names = " < ".join(c.id.value for c in curves)
            raise HypothesisViolated(
                f"interface ordering {names} fails at t={t:g}: {xs}"
            )


def _check_continuity(fields: tuple[PiecewiseField, ...], horizon: float) -> float:
    worst = 0.0
    for f in fields:
        for t in _times(horizon):
            for name, jump in f.jumps(float(t)).items():
                if jump > CONTINUITY_TOL:
                    raise HypothesisViolated(
                        f"jump {jump:.3g} across {name} at t={t:g}"
                    )
                worst = max(worst, jump)
    return worst


def _default_c_llw(p: ModelParams) -> float:
    return linear_determinacy(p).c_llw or 2.0 * math.sqrt(1.0 - p.a)


# =============================================================================
# The four constructions
# =============================================================================


def _terrace_super(
    p: ModelParams,
    c1: float,
    c2: float,
    delta: float,
    aux: Mapping[str, float],
    horizon: float,
) -> BarrierAssembly:
    c_llw_d = aux.get("c_llw_delta", c_llw_delta(p, delta))
    try:
        c2d = perturbed_speeds_terrace(c2, c1, p.a, delta, c_llw_d)
    except DeltaTooLarge as e:
        raise HypothesisViolated(f"terrace preconditions at δ={delta:g}: {e}") from e
    kappa = aux.get("kappa", delta / 2.0)
    if not 0.0 < kappa <= delta / 2.0:
        raise HypothesisViolated(f"κ={kappa:g} outside (0, δ/2]")
    kappa_tilde = aux.get("kappa_tilde", KAPPA_TILDE)
    side = _wave_side(p, c2d, c1, delta, kappa, kappa_tilde, c_llw_d)
    big_d = side.constants["Lambda_delta"]

    hs = h_star(c1, p, delta)
    h = aux.get("h", hs / 2.0)
    if not 0.0 < h < hs:
        raise HypothesisViolated(f"h={h:g} outside (0, h★={hs:g})")
    pi = pi_block(c1, p, delta, h)
    window = pi.window
    level = 1.0 - 2.0 * delta
    eps_gap = (level - pi.value_at(-window)) / 2.0
    if not eps_gap > 0:
        raise HypothesisViolated("π_h at the left end of its window is not below 1-2δ")
    eta_psi = side.psi.level_point(level - eps_gap)
    excess = max(0.0, side.drift2 - c1)
    zeta3 = max(
        eta_psi + window, side.x2(0.0) + window + excess * horizon + INTERFACE_GAP
    )
    pi = pi.moving(c1, zeta3)  # type: ignore[assignment]
    z_peak, top = pi.peak()
    z_trough, trough = pi.trough()
    x3 = crossing_interface(
        InterfaceId.X3_LARGE,
        side.psi,
        pi,
        Bracket(zeta3 - window, c1, zeta3 + z_peak, c1),
        Junction.MAX,
        "ψ̲δ = π_h between the left end of the window and the peak of π_h",
    )

    lam_v = lambda_v(c1, p.r, p.d)
    root = math.sqrt(c1 * c1 - 4.0 * p.r * p.d)
    eta = aux.get("eta", 0.5 * min(root / p.d, big_d, lam_v))
    log_b = -math.inf
    for _ in range(_FIXED_POINT_ITER):
        beta = beta_block(c1, p, eta, log_b)
        s_peak, b_max = beta.peak()
        if not b_max > trough:
            raise HypothesisViolated(
                f"β peak {b_max:.4g} below the π_h trough {trough:.4g}"
            )
        meet = math.sqrt(trough * min(b_max, top))
        xi4 = float(brentq(lambda z: pi.value_at(z) - meet, z_peak, z_trough))
        s4 = float(brentq(lambda z: beta.value_at(z) - meet, 0.0, s_peak))
        zeta4 = xi4 - s4
        lag = beta.xi_beta + side.constants["zeta2"] - zeta3 - zeta4
        new_log_b = math.log(2.0) + big_d * lag
        if abs(new_log_b - log_b) <= 1e-12 * max(1.0, abs(new_log_b)):
            break
        log_b = new_log_b
    else:
        raise NoConvergence("β placement did not settle")
    if not 0.0 < xi4 < window:
        raise HypothesisViolated(f"ξ4={xi4:.6g} outside (0, S={window:.6g})")
    beta = beta.moving(c1, zeta3 + zeta4)  # type: ignore[assignment]
    xi4_curve = linear_interface(
        InterfaceId.XI4, zeta3 + xi4, c1, Junction.MAX, "π_h = β"
    )

    u = PiecewiseField(
        (Piece("phi_bar", side.phi, cap=1.0), Piece("w_bar", side.wbar)), (side.x2,)
    )
    v = PiecewiseField(
        (
            Piece("theta", side.theta, floor=0.0),
            Piece("psi_under", side.psi),
            Piece("pi_h", pi),
            Piece("beta", beta),
        ),
        (side.xi1, x3, xi4_curve),
    )
    _check_order([side.xi1, side.x2, x3, xi4_curve], horizon)
    jump = _check_continuity((u, v), horizon)
    constants = {
        **side.constants,
        "h_star": hs,
        "h": h,
        "S": window,
        "eps_gap": eps_gap,
        "eta_psi": eta_psi,
        "zeta3": zeta3,
        "pi_peak": top,
        "pi_trough": trough,
        "eta_beta": eta,
        "log_B": log_b,
        "xi_beta": beta.xi_beta,  # type: ignore[attr-defined]
        "beta_max": b_max,
        "xi4": xi4,
        "zeta4": zeta4,
        "weighted_from": zeta3 + zeta4 + math.log(2.0) / eta,
        "max_jump": jump,
    }
    return BarrierAssembly(
        BarrierKind.TERRACE_SUPER,
        u,
        v,
        p,
        delta,
        {"c1": c1, "c2": c2, "c2_delta": c2d},
        constants,
        horizon,
    )


def _compact_super(
    p: ModelParams, c2: float, delta: float, aux: Mapping[str, float], horizon: float
) -> BarrierAssembly:
    c_llw = aux.get("c_llw", _default_c_llw(p))
    try:
        c1d, c2d = perturbed_speeds_compact(c2, p, delta, c_llw)
    except (DeltaTooLarge, DomainError) as e:
        raise HypothesisViolated(f"compact preconditions at δ={delta:g}: {e}") from e
    kappa = aux.get("kappa", delta / 2.0)
    if not 0.0 < kappa <= delta / 2.0:
        raise HypothesisViolated(f"κ={kappa:g} outside (0, δ/2]")
    side = _wave_side(
        p,
        c2d,
        c1d,
        delta,
        kappa,
        aux.get("kappa_tilde", KAPPA_TILDE),
        aux.get("c_llw_delta", c_llw_delta(p, delta)),
    )
    r_omega, r_delta = min_radius_omega(p, delta, drift=c1d)
    radius = aux.get("radius", r_delta * (1.0 + 1e-3))
    omega = omega_block(p, delta, radius, drift=c1d)
    if omega.peak_value < 1.0 - 2.0 * delta:
        raise HypothesisViolated(
            f"max ω={omega.peak_value:.6g} below 1-2δ at R={radius:g}"
        )
    excess = max(0.0, side.drift2 - c1d)
    zeta3 = side.x2(0.0) + radius + excess * horizon + INTERFACE_GAP
    omega = omega.moving(c1d, zeta3)  # type: ignore[assignment]
    x3 = crossing_interface(
        InterfaceId.X3_SMALL,
        side.psi,
        omega,
        Bracket(zeta3 - radius, c1d, zeta3 + omega.peak_x, c1d),
        Junction.MAX,
        "ψ̲δ = ω between the left end of the bump and its peak",
    )
    u = PiecewiseField(
        (Piece("phi_bar", side.phi, cap=1.0), Piece("w_bar", side.wbar)), (side.x2,)
    )
    v = PiecewiseField(
        (
            Piece("theta", side.theta, floor=0.0),
            Piece("psi_under", side.psi),
            Piece("omega", omega),
        ),
        (side.xi1, x3),
    )
    _check_order([side.xi1, side.x2, x3], horizon)
    jump = _check_continuity((u, v), horizon)
    constants = {
        **side.constants,
        "R_omega": r_omega,
        "R_delta": r_delta,
        "R": radius,
        "omega_peak": omega.peak_value,
        "omega_peak_x": omega.peak_x,
        "zeta3": zeta3,
        "support_left": side.theta.shift,
        "support_right": zeta3 + radius,
        "max_jump": jump,
    }
    return BarrierAssembly(
        BarrierKind.COMPACT_SUPER,
        u,
        v,
        p,
        delta,
        {"c2": c2, "c1_delta": c1d, "c2_delta": c2d},
        constants,
        horizon,
        pad=2.0 * radius + 20.0,
    )


def _terrace_sub(
    p: ModelParams,
    c1: float,
    c2: float,
    delta: float,
    aux: Mapping[str, float],
    horizon: float,
) -> BarrierAssembly:
    a = p.a
    lam = lambda_u(c2, a)
    big = big_lambda(c2, c1, a)
    lam_v = lambda_v(c1, p.r, p.d)
    disc = c1 * c1 - 4.0 * (lam * (c1 - c2) + 1.0)
    if not disc > 0:
        raise HypothesisViolated(f"c1²-4(λ(c2)(c1-c2)+1)={disc:.4g} is not positive")
    eta = aux.get("eta", 0.5 * min(math.sqrt(disc), lam_v, big))
    q = eta * (c1 - eta - 2.0 * big)
    if not q > 0:
        raise HypothesisViolated(f"η(c1-η-2Λ)={q:.4g} is not positive")
    power = lam_v / eta
    k_star = 2.0 * max(1.0, 1.0 / q)
    c_amp = 0.5 * (q * k_star - 1.0) / (2.0 * a * k_star**power)
    k = 1.0
    for _ in range(_FIXED_POINT_ITER):
        nk = max(1.0, (1.0 + 2.0 * a * c_amp * k**power) / q)
        if abs(nk - k) <= 1e-14 * nk:
            k = nk
            break
        k = nk
    else:
        raise NoConvergence("K_w fixed point did not settle")
    x_w = math.log(k) / eta
    amplitude = 2.0 * c_amp * math.exp(lam_v * x_w)
    w_under = wunder_block(c2, c1, a, amplitude, eta)
    v_bar = exponential_block(lam_v, speed=c1, shift=math.log(c_amp) / lam_v)

    chi = chi_block(c2, a)
    x_peak = w_under.peak_offset
    zeta0 = -math.inf
    for t in _times(horizon):
        half = 0.5 * math.exp(w_under.log_peak(float(t)))
        if half >= chi.front.level:
            continue
        zeta0 = max(zeta0, chi.front.inverse(half) - ((c1 - c2) * t + x_peak))
    if not math.isfinite(zeta0):
        zeta0 = 0.0
    chi = chi.moving(c2, -zeta0)  # type: ignore[assignment]
    x0 = crossing_interface(
        InterfaceId.X0,
        chi,
        w_under,
        Bracket(1e-9, c1, x_peak, c1),
        Junction.MAX,
        "χ = w̲ in (c1 t, X_w + c1 t)",
    )
    u = PiecewiseField((Piece("chi", chi), Piece("w_under", w_under)), (x0,))
    v = PiecewiseField((Piece("v_bar", v_bar, cap=1.0),))
    jump = _check_continuity((u,), horizon)
    constants = {
        "lambda": lam,
        "Lambda": big,
        "lambda_v": lam_v,
        "eta": eta,
        "q": q,
        "C": c_amp,
        "K_w": k,
        "x_w": x_w,
        "X_w": x_peak,
        "A": amplitude,
        "zeta0": zeta0,
        "max_jump": jump,
    }
    return BarrierAssembly(
        BarrierKind.TERRACE_SUB,
        u,
        v,
        p,
        delta,
        {"c1": c1, "c2": c2},
        constants,
        horizon,
    )


def _nonexistence_sub(
    p: ModelParams,
    c1: float,
    c2: float,
    delta: float,
    aux: Mapping[str, float],
    horizon: float,
) -> BarrierAssembly:
    a = p.a
    if not c2 < f_inverse(c1, a):
        raise HypothesisViolated(
            f"nonexistence needs c2 < f⁻¹(c1)={f_inverse(c1, a):.6g}, got c2={c2:g}"
        )
    c, ct = nonexistence_speeds(c1, c2, a)
    bound = z_delta_bound(c, ct, a)
    if not delta < bound:
        raise HypothesisViolated(f"δ={delta:g} not below the z-block bound {bound:.6g}")
    length = aux.get("length", 1.05 * plateau_length_alpha(a))
    alpha = alpha_block(a, length)
    if alpha.peak_value < (1.0 - a) / 2.0:
        raise HypothesisViolated(
            f"max α={alpha.peak_value:.6g} below (1-a)/2 at l={length:g}"
        )
    chi: ChiBlock = chi_block(c, a)
    kappa = aux.get("kappa", 0.5 * min((1.0 - a) / 2.0, delta / 2.0))
    if not 0.0 < kappa < min((1.0 - a) / 2.0, delta / 2.0):
        raise HypothesisViolated(f"κ={kappa:g} outside (0, min((1-a)/2, δ/2))")
    alpha_down = float(
        brentq(lambda z: alpha.value_at(z) - kappa, alpha.peak_x, length)
    )
    zeta0 = alpha_down - chi.front.inverse(kappa)

    z0 = z_block(c, ct, a, delta)
    x_z = z0.peak_offset
    lam_c = lambda_u(c, a)

    def log_chi(s: float) -> float:
        return float(chi.log_value(np.array([s]))[0])

    amp, zeta = 1.0, length
    for _ in range(_FIXED_POINT_ITER):
        new_zeta = max(
            chi.front.inverse(delta / (4.0 * amp)),
            length,
            chi.front.inverse(delta / 2.0),
        )
        new_amp = max(
            1.0,
            max(
                2.0
                * math.exp(
                    log_chi(new_zeta + x_z + (ct - c) * t)
                    + lam_c * (ct - c) * t
                    - log_chi(new_zeta)
                )
                for t in _times(horizon)
            ),
        )
        done = (
            abs(new_zeta - zeta) <= 1e-10 * max(1.0, zeta)
            and abs(new_amp - amp) <= 1e-10 * amp
        )
        zeta, amp = new_zeta, new_amp
        if done:
            break
    else:
        raise NoConvergence("ζ and M for the z block did not settle")
    scale = amp * math.exp(log_chi(zeta)) / z0.shape(x_z)
    z = replace(z0, scale=scale, shift=zeta0 + zeta)
    lam_vt = lambda_v(ct, p.r, p.d)
    v_bar = exponential_block(
        lam_vt, speed=ct, shift=zeta0 + zeta + math.log(delta / (2.0 * a)) / lam_vt
    )
    chi = chi.moving(c, zeta0)  # type: ignore[assignment]

    x0 = crossing_interface(
        InterfaceId.X0_NE,
        alpha,
        chi,
        Bracket(alpha.peak_x, 0.0, length, 0.0),
        Junction.MAX,
        "α = χ between the peak of α and l",
    )
    x1 = crossing_interface(
        InterfaceId.X1_NE,
        chi,
        z,
        Bracket(zeta0 + zeta, ct, zeta0 + zeta + x_z, ct),
        Junction.MAX,
        "χ = z between the left end of z and its peak",
    )
    u = PiecewiseField(
        (Piece("alpha", alpha), Piece("chi", chi), Piece("z", z)), (x0, x1)
    )
    v = PiecewiseField((Piece("v_bar", v_bar, cap=1.0),))
    _check_order([x0, x1], horizon)
    jump = _check_continuity((u,), horizon)

    support_right = zeta0 + zeta + 2.0 * z.radius
    if not zeta0 <= length:
        raise HypothesisViolated(
            f"ζ0={zeta0:g} > L, support of u̲(0) leaves [0, L+ζ+2Rz]"
        )
    cap = delta / (2.0 * a)
    for t in _times(horizon):
        x = x1(float(t))
        if v_bar.at(float(t), x) > cap * (1.0 + 1e-9):
            raise HypothesisViolated(f"v̄ above δ/(2a) at x1({t:g})={x:g}")
    constants = {
        "L": length,
        "alpha_peak": alpha.peak_value,
        "x_L": alpha.peak_x,
        "kappa": kappa,
        "zeta0": zeta0,
        "zeta": zeta,
        "M": amp,
        "Z": scale,
        "R_z": z.radius,
        "X_z": x_z,
        "z_delta_bound": bound,
        "lambda_v_ct": lam_vt,
        "support_right": support_right,
        "max_jump": jump,
    }
    return BarrierAssembly(
        BarrierKind.NONEXISTENCE_SUB,
        u,
        v,
        p,
        delta,
        {"c1": c1, "c2": c2, "c": c, "c_tilde": ct},
        constants,
        horizon,
    )


def assemble(
    which: BarrierKind | str,
    p: ModelParams,
    speeds: Mapping[str, float],
    delta: float,
    aux: Mapping[str, float] | None = None,
    horizon: float = CERT_T_END,
) -> BarrierAssembly:
    """Assemble one of the four barrier pairs.

    Args:
        which: Barrier kind.
        p: Model parameters.
        speeds: ``c2`` always, ``c1`` for every kind except ``compact_super``.
        delta: Perturbation of the kinetics.
        aux: Optional overrides of the constructive constants (``kappa``,
            ``kappa_tilde``, ``h``, ``eta``, ``radius``, ``length``,
            ``c_llw``, ``c_llw_delta``).
        horizon: Time horizon T on which the gluings are guaranteed.

    Raises:
        NotAdmissible: If (c1, c2) is not an interior admissible pair.
        HypothesisViolated: Naming the first failed precondition.
    """
    kind = BarrierKind(which)
    aux = dict(aux or {})
    unknown = set(aux) - _AUX_KEYS
    if unknown:
        raise DomainError(f"unknown auxiliary constants {sorted(unknown)}")
    if not 0.0 < delta < 0.5:
        raise HypothesisViolated(f"δ={delta:g} outside (0, 1/2)")
    if not horizon > 0:
        raise DomainError(f"horizon must be positive, got {horizon}")
    try:
        c2 = float(speeds["c2"])
        c1 = float(speeds["c1"]) if kind is not BarrierKind.COMPACT_SUPER else math.nan
    except KeyError as e:
        raise DomainError(f"{kind.value} needs speed {e.args[0]!r}") from e

    if kind is BarrierKind.COMPACT_SUPER:
        asm = _compact_super(p, c2, delta, aux, horizon)
    else:
        if kind in (BarrierKind.TERRACE_SUPER, BarrierKind.TERRACE_SUB):
            try:
                klass = admissible(c1, c2, p, aux.get("c_llw", _default_c_llw(p)))
            except DomainError as e:
                raise NotAdmissible(c1, c2, "below minimal speeds") from e
            if klass is not Admissibility.INTERIOR:
                raise NotAdmissible(c1, c2, klass.value)
        builder = {
            BarrierKind.TERRACE_SUPER: _terrace_super,
            BarrierKind.TERRACE_SUB: _terrace_sub,
            BarrierKind.NONEXISTENCE_SUB: _nonexistence_sub,
        }[kind]
        asm = builder(p, c1, c2, delta, aux, horizon)
    logger.info(
        f"{kind.value} at δ={delta:g}: "
        + ", ".join(f"{k}={v:.6g}" for k, v in asm.constants.items())
    )
    return asm
