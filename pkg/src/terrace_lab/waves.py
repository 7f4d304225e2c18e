"""Traveling-wave profiles, c_LLW estimation and decay measurement.

Profiles (φ, ψ)(ξ), ξ = x - ct, solve

    -φ'' - cφ'  = φ(1 + δ - φ - aψ)
    -dψ'' - cψ' = rψ(1 - 2δ - ψ - bφ)

with (φ, ψ) → (1+δ, 0) at -∞ and (0, 1-2δ) at +∞, normalized by
ψ(0) = (1-2δ)/2. The truncated problem is discretized by central finite
differences on [-L, L] and solved by damped Newton on the sparse block
Jacobian, with the truncation doubled from a short domain.

The ODEs hold at every interior node. The normalization is an extra pin
row, balanced by leaving φ(L) free: ahead of the front both φ modes decay,
so φ(L) only records the exponentially small tail cut off at L.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .config import (
    LLW_DX,
    LLW_T_END,
    MONOTONE_SLACK,
    NEWTON_MAX_ITER,
    PROFILE_TOL,
    WAVE_CONTINUATION_START,
    WAVE_DX,
    WAVE_TRUNCATION_DECADES,
    WAVE_TRUNCATION_MAX,
    WAVE_TRUNCATION_MIN,
)
from .errors import BandTooNarrow, DomainError, NoConvergence, SubcriticalSpeed
from .fronts import SpeedReport, escape_monitor, fit_speed, track_fronts
from .model import FloatArray, Grid, ModelParams, StatePair
from .seeds import llw_background
from .solver import SolverConfig, dirichlet, integrate
from .speeds import c_llw_delta_bounds, lambda_minus_inf_delta, phi_decay_delta

logger = logging.getLogger(__name__)

NORMALIZATION = "psi(0) = (1-2*delta)/2"
EDGE_FRACTION = 0.1


@dataclass(frozen=True, eq=False)
class WaveProfile:
    """A converged traveling-wave profile on a truncated moving frame."""

    c: float
    delta: float
    xi: FloatArray
    phi: FloatArray
    psi: FloatArray
    params: ModelParams = field(repr=False)
    normalization: str = NORMALIZATION
    newton_iterations: int = 0
    residual: float = math.nan

    @property
    def truncation(self) -> float:
        return float(self.xi[-1])

    @property
    def h(self) -> float:
        return float(self.xi[1] - self.xi[0])

    @property
    def default_plus_band(self) -> tuple[float, float]:
        return 0.05 * self.truncation, 0.15 * self.truncation

    @property
    def default_minus_band(self) -> tuple[float, float]:
        return -0.625 * self.truncation, -0.25 * self.truncation

    @property
    def measured_decay_plus(self) -> float:
        return measure_decay(self, "plus", self.default_plus_band)

    @property
    def measured_decay_minus(self) -> float:
        return measure_decay(self, "minus", self.default_minus_band)

    def truncation_error(self) -> float:
        """Size e^{-rate·L} of the tail cut off by the hard boundary values."""
        rate = _slowest_rate(self.c, self.params, self.delta)
        return math.exp(-rate * self.truncation)


def uniqueness_condition(p: ModelParams) -> bool:
    """d ≤ 2 + r/(1-a), under which profiles are unique up to translation."""
    return p.d <= 2.0 + p.r / (1.0 - p.a)


def _slowest_rate(c: float, p: ModelParams, delta: float) -> float:
    return min(phi_decay_delta(c, p.a, delta), lambda_minus_inf_delta(c, p, delta))


def default_truncation(c: float, p: ModelParams, delta: float = 0.0) -> float:
    """80 / slowest tail rate, clipped to [50, 800]."""
    rate = _slowest_rate(c, p, delta)
    return float(
        np.clip(
            WAVE_TRUNCATION_DECADES / rate, WAVE_TRUNCATION_MIN, WAVE_TRUNCATION_MAX
        )
    )


def _mesh(truncation: float, h: float) -> FloatArray:
    half = int(round(truncation / h))
    return np.linspace(-truncation, truncation, 2 * half + 1)


def _residual(
    phi: FloatArray,
    psi: FloatArray,
    h: float,
    c: float,
    p: ModelParams,
    delta: float,
) -> tuple[FloatArray, FloatArray]:
    """ODE residual at the interior nodes; phi and psi include the boundary nodes."""
    inv_h2, inv_2h = 1.0 / (h * h), 1.0 / (2.0 * h)
    pc, ps = phi[1:-1], psi[1:-1]
    f_phi = (
        -(phi[2:] - 2.0 * pc + phi[:-2]) * inv_h2
        - c * (phi[2:] - phi[:-2]) * inv_2h
        - pc * (1.0 + delta - pc - p.a * ps)
    )
    f_psi = (
        -p.d * (psi[2:] - 2.0 * ps + psi[:-2]) * inv_h2
        - c * (psi[2:] - psi[:-2]) * inv_2h
        - p.r * ps * (1.0 - 2.0 * delta - ps - p.b * pc)
    )
    return f_phi, f_psi


def _jacobian(
    phi: FloatArray,
    psi: FloatArray,
    h: float,
    c: float,
    p: ModelParams,
    delta: float,
    anchor: int,
) -> sp.csc_matrix:
    m = phi.size - 2
    inv_h2, inv_2h = 1.0 / (h * h), 1.0 / (2.0 * h)
    pc, ps = phi[1:-1], psi[1:-1]
    j_pp = sp.diags(
        [
            np.full(m - 1, -inv_h2 + c * inv_2h),
            2.0 * inv_h2 - (1.0 + delta - 2.0 * pc - p.a * ps),
            np.full(m - 1, -inv_h2 - c * inv_2h),
        ],
        [-1, 0, 1],
        format="csr",
    )
    j_ps = sp.diags(p.a * pc, 0, format="csr")
    j_ss = sp.diags(
        [
            np.full(m - 1, -p.d * inv_h2 + c * inv_2h),
            2.0 * p.d * inv_h2 - p.r * (1.0 - 2.0 * delta - 2.0 * ps - p.b * pc),
            np.full(m - 1, -p.d * inv_h2 - c * inv_2h),
        ],
        [-1, 0, 1],
        format="csr",
    )
    j_sp = sp.diags(p.r * p.b * ps, 0, format="csr")
    # free φ(L) enters the last φ row only
    tail = sp.csr_matrix(([-inv_h2 - c * inv_2h], ([m - 1], [0])), shape=(2 * m, 1))
    # pin row: ψ_anchor - (1-2δ)/2
    pin = sp.csr_matrix(([1.0], ([0], [m + anchor])), shape=(1, 2 * m))
    ode = sp.bmat([[j_pp, j_ps], [j_sp, j_ss]], format="csr")
    return sp.bmat([[ode, tail], [pin, None]], format="csc")


def _newton(
    xi: FloatArray,
    phi: FloatArray,
    psi: FloatArray,
    c: float,
    p: ModelParams,
    delta: float,
    tol: float,
    max_iter: int,
) -> tuple[FloatArray, FloatArray, int, float]:
    """Damped Newton with step halving on the pinned system.

    Unknowns are the interior φ and ψ followed by φ(L).
    """
    h = float(xi[1] - xi[0])
    anchor = int(np.argmin(np.abs(xi))) - 1
    target = (1.0 - 2.0 * delta) / 2.0
    m = xi.size - 2

    def system(ph: FloatArray, ps: FloatArray) -> FloatArray:
        f_phi, f_psi = _residual(ph, ps, h, c, p, delta)
        return np.concatenate((f_phi, f_psi, [ps[anchor + 1] - target]))

    f = system(phi, psi)
    norm = float(np.max(np.abs(f)))
    for it in range(1, max_iter + 1):
        if norm < tol:
            return phi, psi, it - 1, norm
        step = spsolve(_jacobian(phi, psi, h, c, p, delta, anchor), -f)
        damping = 1.0
        while True:
            trial_phi, trial_psi = phi.copy(), psi.copy()
            trial_phi[1:-1] += damping * step[:m]
            trial_psi[1:-1] += damping * step[m : 2 * m]
            trial_phi[-1] += damping * step[-1]
            trial_f = system(trial_phi, trial_psi)
            trial_norm = float(np.max(np.abs(trial_f)))
            if trial_norm < (1.0 - 1e-4 * damping) * norm or damping < 1.0 / 1024:
                break
            damping /= 2.0
        phi, psi, f, norm = trial_phi, trial_psi, trial_f, trial_norm
        logger.debug(
            f"newton c={c:g} L={xi[-1]:g}: iter {it}, "
            f"damping {damping:g}, |F|={norm:.3e}"
        )
        if not np.isfinite(norm):
            break
    if norm < tol:
        return phi, psi, max_iter, norm
    raise NoConvergence(f"wave profile at c={c:g}, truncation {xi[-1]:g}", norm)


def _logistic_guess(
    xi: FloatArray, delta: float, kappa: float
) -> tuple[FloatArray, FloatArray]:
    s = 0.5 * (1.0 - np.tanh(0.5 * kappa * xi))
    return (1.0 + delta) * s, (1.0 - 2.0 * delta) * (1.0 - s)


def _with_boundary(
    phi: FloatArray, psi: FloatArray, delta: float
) -> tuple[FloatArray, FloatArray]:
    phi, psi = phi.copy(), psi.copy()
    phi[0], psi[0] = 1.0 + delta, 0.0
    phi[-1], psi[-1] = 0.0, 1.0 - 2.0 * delta
    return phi, psi


def _regrid(
    xi_new: FloatArray, xi: FloatArray, phi: FloatArray, psi: FloatArray, delta: float
) -> tuple[FloatArray, FloatArray]:
    phi_new = np.interp(xi_new, xi, phi, left=1.0 + delta, right=0.0)
    psi_new = np.interp(xi_new, xi, psi, left=0.0, right=1.0 - 2.0 * delta)
    return _with_boundary(phi_new, psi_new, delta)


def solve_profile(
    c: float,
    p: ModelParams,
    delta: float = 0.0,
    truncation: float | None = None,
    mesh: int | None = None,
    c_llw: float | None = None,
    kappa: float = 0.5,
    guess: WaveProfile | None = None,
    tol: float = PROFILE_TOL,
) -> WaveProfile:
    """Solve for the traveling-wave profile of speed c.

    Args:
        c: Wave speed, above c_LLW of the (δ-)system.
        p: Model parameters.
        delta: Perturbation of the kinetics.
        truncation: Half-length L of the moving-frame domain; defaults to
            80 over the slowest tail rate, clipped to [50, 800].
        mesh: Number of nodes on [-L, L]; odd so that ξ = 0 is a node.
        c_llw: Known c_LLW of the δ-system; defaults to its lower bound.
        kappa: Steepness of the logistic initial guess.
        guess: Profile to start Newton from instead of the logistic ramp;
            no truncation continuation is done then.
        tol: Max-norm residual at convergence.

    Raises:
        SubcriticalSpeed: If c is below c_LLW.
        NoConvergence: If Newton stalls, with the last residual.
    """
    if c_llw is None:
        c_llw = c_llw_delta_bounds(p.a, delta)[0]
    if c < c_llw * (1.0 - 1e-12):
        raise SubcriticalSpeed(f"c={c:g} is below c_LLW={c_llw:g}")
    if truncation is None:
        truncation = default_truncation(c, p, delta)
    if mesh is None:
        h = WAVE_DX
    else:
        nodes = mesh if mesh % 2 else mesh + 1
        h = 2.0 * truncation / (nodes - 1)
    xi_final = _mesh(truncation, h)

    if guess is not None:
        phi, psi = _regrid(xi_final, guess.xi, guess.phi, guess.psi, delta)
        phi, psi, iters, norm = _newton(
            xi_final, phi, psi, c, p, delta, tol, NEWTON_MAX_ITER
        )
        return WaveProfile(
            c, delta, xi_final, phi, psi, p, NORMALIZATION, iters, norm
        )

    length = min(WAVE_CONTINUATION_START, truncation)
    xi = _mesh(length, h)
    phi, psi = _with_boundary(*_logistic_guess(xi, delta, kappa), delta)
    iters_total = 0
    while True:
        phi, psi, iters, norm = _newton(xi, phi, psi, c, p, delta, tol, NEWTON_MAX_ITER)
        iters_total += iters
        logger.debug(f"profile c={c:g} converged on L={length:g} in {iters} iterations")
        if length >= truncation:
            break
        length = min(2.0 * length, truncation)
        xi_next = _mesh(length, h)
        phi, psi = _regrid(xi_next, xi, phi, psi, delta)
        xi = xi_next
    return WaveProfile(c, delta, xi, phi, psi, p, NORMALIZATION, iters_total, norm)


def continuation(
    speeds: Sequence[float], p: ModelParams, delta: float = 0.0, **kwargs: object
) -> list[WaveProfile]:
    """Profiles along a list of speeds, each seeded by its predecessor."""
    out: list[WaveProfile] = []
    for c in speeds:
        prev = out[-1] if out else None
        w = solve_profile(c, p, delta, guess=prev, **kwargs)  # type: ignore[arg-type]
        out.append(w)
    return out


def profile_residual(w: WaveProfile, p: ModelParams) -> float:
    """Max-norm of the discretized ODE residual, anchor node included."""
    f_phi, f_psi = _residual(w.phi, w.psi, w.h, w.c, p, w.delta)
    return float(max(np.max(np.abs(f_phi)), np.max(np.abs(f_psi))))


def is_monotone(w: WaveProfile, slack: float = MONOTONE_SLACK) -> bool:
    """φ nonincreasing and ψ nondecreasing within ``slack``."""
    return bool(np.all(np.diff(w.phi) <= slack) and np.all(np.diff(w.psi) >= -slack))


def measure_decay(w: WaveProfile, side: str, fit_band: tuple[float, float]) -> float:
    """Exponential rate of φ on the plus side, of ψ on the minus side.

    Raises:
        BandTooNarrow: If the band is closer than 10% of the truncation to
            an edge or holds fewer than three nodes.
    """
    lo, hi = fit_band
    edge = (1.0 - EDGE_FRACTION) * w.truncation
    if not -edge <= lo < hi <= edge:
        raise BandTooNarrow(f"band [{lo:g}, {hi:g}] must lie within ±{edge:g}")
    inside = (w.xi >= lo) & (w.xi <= hi)
    if np.count_nonzero(inside) < 3:
        raise BandTooNarrow(f"band [{lo:g}, {hi:g}] holds fewer than 3 nodes")
    if side == "plus":
        values, sign = w.phi[inside], -1.0
    elif side == "minus":
        values, sign = w.psi[inside], 1.0
    else:
        raise DomainError(f"side must be 'plus' or 'minus', got {side!r}")
    if np.any(values <= 0):
        raise BandTooNarrow(f"profile is not positive on [{lo:g}, {hi:g}]")
    slope, _ = np.polyfit(w.xi[inside], np.log(values), 1)
    return float(sign * slope)


def estimate_c_llw(
    p: ModelParams,
    delta: float = 0.0,
    numerics: SolverConfig | None = None,
    t_end: float = LLW_T_END,
    dx: float = LLW_DX,
) -> float:
    """Spreading speed of u invading v at its equilibrium, by direct simulation.

    Args:
        p: Model parameters.
        delta: Perturbation of the kinetics.
        numerics: Full solver config to use instead of the default grid
            [-20, 2.6·√(1+δ)·T + 20] with spacing ``dx``.
        t_end: Final time of the default run.
        dx: Grid spacing of the default run.

    Returns:
        The u-front speed fitted on the second half of the run.
    """
    if numerics is None:
        x_max = 1.3 * 2.0 * math.sqrt(1.0 + delta) * t_end + 20.0
        grid = Grid.from_spacing(-20.0, x_max, dx)
        numerics = SolverConfig.build(grid, p, t_end, delta=delta)
    u0, v0 = llw_background(numerics.grid, p)
    v0 = v0 * (1.0 - 2.0 * delta)
    s0 = StatePair(0.0, u0, v0, numerics.grid)
    traj = integrate(s0, p, numerics, [escape_monitor()])
    track_u, _ = track_fronts(traj)
    report = fit_speed(track_u)
    logger.debug(f"c_LLW estimate at delta={delta:g}: {report.fitted_speed:.6g}")
    return report.fitted_speed


def translate_check(w: WaveProfile, t_end: float = 30.0) -> SpeedReport:
    """Evolve the profile in the time-dependent solver and fit its front speed.

    The profile's own nodes form the grid, with its limit states held at
    both ends.
    """
    grid = Grid(float(w.xi[0]), float(w.xi[-1]), w.xi.size)
    cfg = SolverConfig.build(
        grid,
        w.params,
        t_end,
        snapshot_every=0.5,
        left_bc=dirichlet(1.0 + w.delta, 0.0),
        right_bc=dirichlet(0.0, 1.0 - 2.0 * w.delta),
        delta=w.delta,
    )
    traj = integrate(StatePair(0.0, w.phi.copy(), w.psi.copy(), grid), w.params, cfg)
    track_u, _ = track_fronts(traj)
    return fit_speed(track_u, window_fraction=1.0, predicted=w.c)
