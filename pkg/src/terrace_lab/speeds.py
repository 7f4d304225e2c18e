"""Closed-form speed and decay calculus.

Every function here is a pure function of floats. Quadratic roots are taken
in the cancellation-free form 2q / (s + √(s² - 4q)) so the defining
quadratics hold to round-off even near double roots.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import NamedTuple

from scipy.optimize import brentq

from .config import BOUNDARY_TOL, DELTA_CANDIDATES, ROOT_XTOL
from .errors import BoundaryCase, DeltaTooLarge, DomainError, HypothesisViolated
from .model import ModelParams

logger = logging.getLogger(__name__)

_DISC_TOL = 1e-12


class CaseId(str, Enum):
    """Outcome of the spreading trichotomy."""

    EXTINCTION = "extinction"
    ACCELERATED = "accelerated"
    LLW = "llw"


class Admissibility(str, Enum):
    """Position of a speed pair relative to the admissible region."""

    INTERIOR = "interior"
    LOWER_BOUND_VIOLATED = "lower_bound_violated"
    BOUNDARY = "boundary"


class Side(str, Enum):
    MINUS_INF = "minus_inf"
    PLUS_INF = "plus_inf"


@dataclass(frozen=True)
class SpeedPrediction:
    """Predicted front speeds for Heaviside-like u and compactly supported v."""

    case_id: CaseId
    c1_star: float
    c2_star: float
    c_llw_used: float
    linearly_determined: bool

    def as_dict(self) -> dict[str, object]:
        data = asdict(self)
        data["case_id"] = self.case_id.value
        return data


@dataclass(frozen=True)
class DecayClass:
    """Branch of the profile decay classification on one side.

    ``rates`` holds the named exponents, ``leading`` the predicted leading
    decay rate of each component (``phi``: distance of φ to its limit,
    ``psi``: distance of ψ to its limit). ``polynomial_factor`` marks a
    ξ·e^{-λξ} leading term.
    """

    side: Side
    case_label: str
    rates: tuple[tuple[str, float], ...]
    leading: tuple[tuple[str, float], ...]
    polynomial_factor: bool = False

    def rate(self, symbol: str) -> float:
        return dict(self.rates)[symbol]

    def leading_rate(self, component: str) -> float:
        return dict(self.leading)[component]


class LinearDeterminacy(NamedTuple):
    llw_condition: bool
    huang_condition: bool
    c_llw: float | None


@dataclass(frozen=True)
class TerraceConditions:
    """The six conditions on c2^δ = (λ_δ⁻¹ ∘ λ)(c2) for a terrace barrier."""

    c2: float
    c1: float
    delta: float
    c2_delta: float
    above_llw: bool
    converging: bool
    ordered: bool
    f_delta_below_c1: bool
    lambda_defined: bool
    lambda_decreased: bool

    def failed(self) -> list[str]:
        names = (
            "above_llw",
            "converging",
            "ordered",
            "f_delta_below_c1",
            "lambda_defined",
            "lambda_decreased",
        )
        return [n for n in names if not getattr(self, n)]

    @property
    def ok(self) -> bool:
        return not self.failed()


def _smaller_root(s: float, q: float, what: str) -> float:
    """Smaller root of x² - s x + q = 0 for s > 0, q > 0."""
    disc = s * s - 4.0 * q
    if disc < -_DISC_TOL * max(1.0, s * s):
        raise DomainError(f"{what}: negative discriminant {disc:.3e}")
    return 2.0 * q / (s + math.sqrt(max(disc, 0.0)))


def _is_close(x: float, y: float, tol: float = BOUNDARY_TOL) -> bool:
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


# =============================================================================
# Auxiliary functions f, λ, Λ and their δ-variants
# =============================================================================


def a_delta(a: float, delta: float) -> float:
    """a_δ = (1-2δ)a/(1+δ), decreasing in δ with a_0 = a."""
    return (1.0 - 2.0 * delta) * a / (1.0 + delta)


def lambda_u(c: float, a: float, delta: float = 0.0) -> float:
    """λ_δ(c): smaller root of λ² - cλ + (1 - a_δ) = 0."""
    k = 1.0 - a_delta(a, delta)
    if c < 2.0 * math.sqrt(k) * (1.0 - _DISC_TOL):
        raise DomainError(f"lambda_u: c={c:g} below 2√(1-a_δ)={2 * math.sqrt(k):g}")
    return _smaller_root(c, k, "lambda_u")


def lambda_u_inverse(l: float, a: float, delta: float = 0.0) -> float:
    """λ_δ⁻¹(l) = l + (1 - a_δ)/l on (0, √(1 - a_δ)]."""
    k = 1.0 - a_delta(a, delta)
    if not 0.0 < l <= math.sqrt(k) * (1.0 + _DISC_TOL):
        raise DomainError(f"lambda_u_inverse: rate {l:g} outside (0, {math.sqrt(k):g}]")
    return l + k / l


def lambda_v(c: float, r: float, d: float) -> float:
    """λ_v(c): smaller root of dλ² - cλ + r = 0."""
    if c < 2.0 * math.sqrt(r * d) * (1.0 - _DISC_TOL):
        raise DomainError(f"lambda_v: c={c:g} below 2√(rd)={2 * math.sqrt(r * d):g}")
    return _smaller_root(c / d, r / d, "lambda_v")


def f_delta(c: float, a: float, delta: float) -> float:
    """f_δ(c) = c - √(c² - 4(1-a_δ)) + 2√a_δ."""
    return 2.0 * lambda_u(c, a, delta) + 2.0 * math.sqrt(a_delta(a, delta))


def f_of(c: float, a: float) -> float:
    """f(c) = c - √(c² - 4(1-a)) + 2√a, decreasing from 2(√(1-a)+√a) to 2√a."""
    return f_delta(c, a, 0.0)


def _f_inverse_general(ct: float, a_eff: float) -> float:
    sa = math.sqrt(a_eff)
    hi = 2.0 * (math.sqrt(1.0 - a_eff) + sa)
    if not 2.0 * sa < ct <= hi * (1.0 + _DISC_TOL):
        raise DomainError(f"f_inverse: {ct:g} outside (2√a, {hi:g}]")
    return ct / 2.0 - sa + 2.0 * (1.0 - a_eff) / (ct - 2.0 * sa)


def f_inverse(ct: float, a: float) -> float:
    """f⁻¹(c̃) = c̃/2 - √a + 2(1-a)/(c̃ - 2√a)."""
    return _f_inverse_general(ct, a)


def f_delta_inverse(ct: float, a: float, delta: float) -> float:
    return _f_inverse_general(ct, a_delta(a, delta))


def big_lambda(c: float, ct: float, a: float, delta: float = 0.0) -> float:
    """Λ_δ(c, c̃): smaller root of Λ² - c̃Λ + λ_δ(c)(c̃-c) + 1 = 0.

    Defined for c ≥ 2√(1-a_δ) and c̃ ≥ max(c, f_δ(c)).
    """
    lam = lambda_u(c, a, delta)
    if ct < c * (1.0 - _DISC_TOL):
        raise DomainError(f"big_lambda: c̃={ct:g} below c={c:g}")
    if ct < f_delta(c, a, delta) - _DISC_TOL * max(1.0, ct):
        raise DomainError(
            f"big_lambda: c̃={ct:g} below f_δ(c)={f_delta(c, a, delta):g}"
        )
    return _smaller_root(ct, lam * (ct - c) + 1.0, "big_lambda")


def c_acc(r: float, d: float, a: float) -> float:
    """Accelerated second-front speed f⁻¹(2√(rd)), in closed form."""
    s = math.sqrt(r * d)
    sa = math.sqrt(a)
    hi = math.sqrt(1.0 - a) + sa
    if not sa < s <= hi * (1.0 + _DISC_TOL):
        raise DomainError(f"c_acc: 2√(rd)={2 * s:g} outside the range of f")
    return s - sa + (1.0 - a) / (s - sa)


def w_speed(c: float, ct: float, a: float) -> float:
    """Speed (Λ² + 1)/Λ of the KPP super-solution with decay Λ(c, c̃)."""
    lam = big_lambda(c, ct, a)
    return (lam * lam + 1.0) / lam


# =============================================================================
# Decay rates of traveling profiles
# =============================================================================


def lambda_minus_inf(c: float, p: ModelParams) -> float:
    """ψ-decay at -∞ of a profile: (√(c² + 4rd(b-1)) - c)/(2d)."""
    return lambda_minus_inf_delta(c, p, 0.0)


def lambda_minus_inf_delta(c: float, p: ModelParams, delta: float) -> float:
    """ψ-decay at -∞ of the δ-perturbed profile."""
    k = p.r * p.d * (p.b - 1.0 + (p.b + 2.0) * delta)
    # (√(c²+4k) - c)/(2d) written without cancellation
    return 2.0 * k / (p.d * (math.sqrt(c * c + 4.0 * k) + c))


def tail_rates(c: float, p: ModelParams) -> dict[str, float]:
    """All five tail exponents of a profile of speed c ≥ 2√(1-a)."""
    disc = c * c - 4.0 * (1.0 - p.a)
    if disc < -_DISC_TOL * max(1.0, c * c):
        raise DomainError(f"decay rates: c={c:g} below 2√(1-a)")
    sq = math.sqrt(max(disc, 0.0))
    return {
        "lambda1_minus": 2.0 / (math.sqrt(c * c + 4.0) + c),
        "lambda2_minus": lambda_minus_inf(c, p),
        "lambda1_plus": (c + math.sqrt(c * c + 4.0 * p.r * p.d)) / (2.0 * p.d),
        "lambda2_plus": (c + sq) / 2.0,
        "lambda3_plus": lambda_u(c, p.a),
    }


def r_minus_inf(lam: float, c: float) -> float:
    """Characteristic polynomial at -∞: λ² + cλ - 1."""
    return lam * lam + c * lam - 1.0


def r_plus_inf(lam: float, c: float, p: ModelParams) -> float:
    """Characteristic polynomial at +∞: dλ² - cλ - r."""
    return p.d * lam * lam - c * lam - p.r


def _cmp(x: float, y: float) -> int:
    if _is_close(x, y, 1e-10):
        return 0
    return -1 if x < y else 1


def decay_classify(
    c: float,
    p: ModelParams,
    side: Side | str = Side.PLUS_INF,
    supercritical: bool = True,
) -> DecayClass:
    """Classify the tail behavior of a profile of speed c on one side.

    Args:
        c: Wave speed, at least 2√(1-a).
        p: Model parameters.
        side: Which end of the profile.
        supercritical: Whether c exceeds c_LLW; then φ decays slowly at λ₃.

    Returns:
        The branch label (1a-1c on the left, 2a-i..2a-v or 2b-i..2b-iii on
        the right) with the rates and leading decays.
    """
    side = Side(side)
    rates = tail_rates(c, p)
    l1m, l2m = rates["lambda1_minus"], rates["lambda2_minus"]
    l1p, l2p, l3p = rates["lambda1_plus"], rates["lambda2_plus"], rates["lambda3_plus"]

    if side is Side.MINUS_INF:
        order = _cmp(l2m, l1m)
        label = {1: "1a", -1: "1b", 0: "1c"}[order]
        leading = (("phi", min(l1m, l2m)), ("psi", l2m))
        named = (("lambda1_minus", l1m), ("lambda2_minus", l2m))
        return DecayClass(side, label, named, leading, polynomial_factor=order == 0)

    named = (("lambda1_plus", l1p), ("lambda2_plus", l2p), ("lambda3_plus", l3p))
    if _cmp(l2p, l3p) == 0:
        order = _cmp(l1p, l2p)
        label = {-1: "2b-i", 0: "2b-ii", 1: "2b-iii"}[order]
        leading = (("phi", l2p), ("psi", min(l1p, l2p)))
        return DecayClass(side, label, named, leading, polynomial_factor=True)

    if _cmp(l1p, l3p) < 0:
        label = "2a-i"
    elif _cmp(l1p, l3p) == 0:
        label = "2a-ii"
    elif _cmp(l1p, l2p) < 0:
        label = "2a-iii"
    elif _cmp(l1p, l2p) == 0:
        label = "2a-iv"
    else:
        label = "2a-v"
    phi_rate = l3p if supercritical else l2p
    leading = (("phi", phi_rate), ("psi", min(l1p, phi_rate)))
    return DecayClass(side, label, named, leading, polynomial_factor=label == "2a-ii")


def leading_decays(
    c: float, p: ModelParams, supercritical: bool = True
) -> dict[str, float]:
    """Leading decay rate per side and component, keyed like ``plus_inf.phi``."""
    out: dict[str, float] = {}
    for side in Side:
        klass = decay_classify(c, p, side, supercritical)
        for component, value in klass.leading:
            out[f"{side.value}.{component}"] = value
    return out


# =============================================================================
# Trichotomy and admissible speed pairs
# =============================================================================


def linear_determinacy(p: ModelParams) -> LinearDeterminacy:
    """Sufficient conditions for c_LLW = 2√(1-a)."""
    d, r, a, b = p.d, p.r, p.a, p.b
    llw = d <= 2.0 and (a * b - 1.0) / (1.0 - a) <= (2.0 - d) / r
    if d == 1.0:
        second = -math.inf
    else:
        second = (d - 2.0) / (2.0 * abs(d - 1.0))
    huang = ((2.0 - d) * (1.0 - a) + r) / (r * b) >= max(a, second)
    c_llw = 2.0 * math.sqrt(1.0 - a) if (llw or huang) else None
    return LinearDeterminacy(llw, huang, c_llw)


def predict_trichotomy(p: ModelParams, c_llw: float) -> SpeedPrediction:
    """Predict the spreading speeds for Heaviside-like u and compact v.

    Args:
        p: Model parameters.
        c_llw: The LLW speed, in [2√(1-a), 2].

    Raises:
        DomainError: If c_llw is outside [2√(1-a), 2].
        BoundaryCase: If 2√(rd) equals 2 or f(c_llw).
    """
    lo = 2.0 * math.sqrt(1.0 - p.a)
    if not lo * (1.0 - BOUNDARY_TOL) <= c_llw <= 2.0 * (1.0 + BOUNDARY_TOL):
        raise DomainError(f"c_llw={c_llw:g} outside [{lo:g}, 2]")
    c_llw = min(max(c_llw, lo), 2.0)
    determined = linear_determinacy(p).c_llw is not None
    cv = p.kpp_v_speed
    f_llw = f_of(c_llw, p.a)

    if _is_close(cv, 2.0):
        raise BoundaryCase(f"2√(rd) = {cv:.12g} equals the KPP speed 2 of u")
    if _is_close(cv, f_llw):
        raise BoundaryCase(f"2√(rd) = {cv:.12g} equals f(c_LLW) = {f_llw:.12g}")

    if cv < 2.0:
        case, c1, c2 = CaseId.EXTINCTION, 2.0, 2.0
    elif cv < f_llw:
        case, c1, c2 = CaseId.ACCELERATED, cv, c_acc(p.r, p.d, p.a)
    else:
        case, c1, c2 = CaseId.LLW, cv, c_llw
    logger.debug(f"trichotomy: {case.value} with c1*={c1:.6g}, c2*={c2:.6g}")
    return SpeedPrediction(case, c1, c2, c_llw, determined)


def admissible(c1: float, c2: float, p: ModelParams, c_llw: float) -> Admissibility:
    """Locate (c1, c2) relative to the set of reachable terrace speeds.

    Raises:
        DomainError: If c1 < 2√(rd) or c2 < c_llw.
    """
    cv = p.kpp_v_speed
    if c1 < cv * (1.0 - BOUNDARY_TOL) or c2 < c_llw * (1.0 - BOUNDARY_TOL):
        raise DomainError(f"pair (c1={c1:g}, c2={c2:g}) below (2√(rd), c_LLW)")
    fc2 = f_of(max(c2, 2.0 * math.sqrt(1.0 - p.a)), p.a)
    strictly = (
        c1 > cv
        and c2 > c_llw
        and c1 > c2
        and c1 > fc2
        and not _is_close(c1, cv)
        and not _is_close(c2, c_llw)
        and not _is_close(c1, c2)
        and not _is_close(c1, fc2)
    )
    if strictly:
        return Admissibility.INTERIOR
    if c2 < c1 and c1 < fc2 and not _is_close(c1, c2) and not _is_close(c1, fc2):
        return Admissibility.LOWER_BOUND_VIOLATED
    return Admissibility.BOUNDARY


# =============================================================================
# δ-perturbed speeds
# =============================================================================


def c_llw_delta_bounds(a: float, delta: float) -> tuple[float, float]:
    """Bounds 2√((1+δ)(1-a_δ)) ≤ c_LLW^δ ≤ 2√(1+δ)."""
    return (
        2.0 * math.sqrt((1.0 + delta) * (1.0 - a_delta(a, delta))),
        2.0 * math.sqrt(1.0 + delta),
    )


def delta_rescaled_params(p: ModelParams, delta: float) -> ModelParams:
    """Parameters of the standard system equivalent to the δ-perturbed one."""
    return ModelParams(
        d=p.d,
        r=(1.0 - 2.0 * delta) * p.r / (1.0 + delta),
        a=a_delta(p.a, delta),
        b=(1.0 + delta) * p.b / (1.0 - 2.0 * delta),
    )


def c_llw_delta(p: ModelParams, delta: float) -> float | None:
    """c_LLW^δ when the rescaled system is linearly determinate, else None."""
    if linear_determinacy(delta_rescaled_params(p, delta)).c_llw is None:
        return None
    return c_llw_delta_bounds(p.a, delta)[0]


def terrace_conditions(
    c2: float,
    c1: float,
    a: float,
    delta: float,
    c_llw_delta: float | None = None,
) -> TerraceConditions:
    """Evaluate the six conditions on c2^δ for the terrace barriers.

    Args:
        c2: Second-front speed.
        c1: First-front speed.
        a: Competition coefficient on u.
        delta: Perturbation.
        c_llw_delta: c_LLW^δ; defaults to its lower bound, exact under
            linear determinacy of the rescaled system.

    Raises:
        DeltaTooLarge: If λ(c2) ≥ √(1-a_δ), so c2^δ is undefined.
    """
    lam = lambda_u(c2, a)
    k = 1.0 - a_delta(a, delta)
    if lam >= math.sqrt(k):
        raise DeltaTooLarge(delta, f"λ(c2)={lam:g} ≥ √(1-a_δ)={math.sqrt(k):g}")
    c2d = lambda_u_inverse(lam, a, delta)
    if c_llw_delta is None:
        c_llw_delta = c_llw_delta_bounds(a, delta)[0]

    if delta > 0:
        half = lambda_u_inverse(lam, a, delta / 2.0)
        converging = abs(half - c2) < abs(c2d - c2)
    else:
        converging = True
    fd = f_delta(c2d, a, delta)
    defined = c1 >= max(c2d, fd)
    decreased = defined and big_lambda(c2d, c1, a, delta) <= big_lambda(c2, c1, a)
    return TerraceConditions(
        c2=c2,
        c1=c1,
        delta=delta,
        c2_delta=c2d,
        above_llw=c2d > c_llw_delta,
        converging=converging,
        ordered=(c2 < c2d < c1) if delta > 0 else c2d < c1,
        f_delta_below_c1=fd < c1,
        lambda_defined=defined,
        lambda_decreased=decreased,
    )


def perturbed_speeds_terrace(
    c2: float, c1: float, a: float, delta: float, c_llw_delta: float | None = None
) -> float:
    """c2^δ = (λ_δ⁻¹ ∘ λ)(c2), checked against the six terrace conditions.

    Raises:
        DeltaTooLarge: Naming the first failed condition.
    """
    report = terrace_conditions(c2, c1, a, delta, c_llw_delta)
    failed = report.failed()
    if failed:
        raise DeltaTooLarge(delta, ", ".join(failed))
    return report.c2_delta


def perturbed_speeds_compact(
    c2: float, p: ModelParams, delta: float, c_llw: float | None = None
) -> tuple[float, float]:
    """Perturbed speeds (c1^δ, c2^δ) of the compactly supported barrier.

    c1^δ = 2√(r(1-2δ)d) - δ and c2^δ solves Λ_δ(·, c1^δ) = Λ(c2, 2√(rd)).

    Raises:
        DomainError: If c2 is outside (max(c_LLW, f⁻¹(2√(rd))), 2).
        DeltaTooLarge: If the root is not bracketed or the speeds are not
            ordered as c2 < c2^δ < c1^δ < 2√(rd).
    """
    cv = p.kpp_v_speed
    if c_llw is None:
        c_llw = 2.0 * math.sqrt(1.0 - p.a)
    lo_c2 = max(c_llw, f_inverse(cv, p.a))
    if not lo_c2 < c2 < 2.0:
        raise DomainError(f"compact barrier needs c2 in ({lo_c2:g}, 2), got {c2:g}")

    c1d = 2.0 * math.sqrt(p.r * (1.0 - 2.0 * delta) * p.d) - delta
    target = big_lambda(c2, cv, p.a)
    ad = a_delta(p.a, delta)
    c_lo = 2.0 * math.sqrt(1.0 - ad)
    if c1d < f_delta(c_lo, p.a, delta):
        c_lo = max(c_lo, f_delta_inverse(c1d, p.a, delta))
    if c_lo >= c1d:
        raise DeltaTooLarge(delta, "no speed c ≤ c1^δ with c1^δ ≥ f_δ(c)")

    def gap(c: float) -> float:
        return big_lambda(c, c1d, p.a, delta) - target

    g_lo, g_hi = gap(c_lo), gap(c1d)
    if not (g_lo >= 0.0 >= g_hi):
        raise DeltaTooLarge(delta, "Λ(c2, 2√(rd)) outside the range of Λ_δ(·, c1^δ)")
    c2d = float(brentq(gap, c_lo, c1d, xtol=ROOT_XTOL))
    if not c2 < c2d < c1d < cv:
        raise DeltaTooLarge(
            delta, f"ordering c2 < c2^δ={c2d:g} < c1^δ={c1d:g} < 2√(rd) fails"
        )
    logger.debug(
        f"compact speeds at delta={delta:g}: c1^δ={c1d:.10g}, c2^δ={c2d:.10g}"
    )
    return c1d, c2d


def nonexistence_speeds(c1: float, c2: float, a: float) -> tuple[float, float]:
    """Intermediate speeds (c, c̃) with c2 < c < f⁻¹(c1) and c1 < c̃ < f(c)."""
    c = c2 + 0.25 * (f_inverse(c1, a) - c2)
    ct = c1 + 0.25 * (f_of(c, a) - c1)
    return c, ct


def z_delta_bound(c: float, ct: float, a: float) -> float:
    """Upper bound on δ for the decaying sine block at speeds (c, c̃)."""
    return (-ct * ct + 4.0 * (lambda_u(c, a) * (ct - c) + 1.0)) / 4.0


def delta_star(
    p: ModelParams,
    c1: float,
    c2: float,
    which: str = "terrace",
    candidates: tuple[float, ...] = DELTA_CANDIDATES,
) -> float:
    """Largest candidate δ for which the closed-form preconditions hold.

    Args:
        p: Model parameters.
        c1: First-front speed (ignored for the compact barrier).
        c2: Second-front speed.
        which: ``terrace``, ``compact`` or ``nonexistence``.
        candidates: δ values tried from largest to smallest.

    Raises:
        HypothesisViolated: If no candidate passes.
    """
    for delta in sorted(candidates, reverse=True):
        try:
            if which == "terrace":
                perturbed_speeds_terrace(c2, c1, p.a, delta, c_llw_delta(p, delta))
            elif which == "compact":
                perturbed_speeds_compact(c2, p, delta)
            elif which == "nonexistence":
                c, ct = nonexistence_speeds(c1, c2, p.a)
                if not delta < z_delta_bound(c, ct, p.a):
                    continue
            else:
                raise DomainError(f"unknown barrier kind {which!r}")
        except (DeltaTooLarge, DomainError) as e:
            logger.debug(f"delta={delta:g} rejected for {which}: {e}")
            continue
        return delta
    raise HypothesisViolated(
        f"no δ in {sorted(candidates)} satisfies the {which} preconditions"
    )


def phi_decay_delta(c: float, a: float, delta: float) -> float:
    """φ-decay at +∞ of the δ-perturbed wave: smaller root of λ² - cλ + (1+δ)(1-a_δ).

    Equals lambda_u(c, a) at δ = 0.
    """
    k = (1.0 + delta) * (1.0 - a_delta(a, delta))
    if c < 2.0 * math.sqrt(k) * (1.0 - _DISC_TOL):
        raise DomainError(f"phi_decay_delta: c={c:g} below 2√((1+δ)(1-a_δ))")
    return _smaller_root(c, k, "phi_decay_delta")
