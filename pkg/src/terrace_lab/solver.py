"""Explicit finite-difference integrator on a truncated line.

Forward Euler in time, second-order central differences in space, kinetics
evaluated pointwise. Under ``dt <= cfl_limit`` every update is a convex
combination plus a monotone reaction term, so the invariant region [0, 1]²
is preserved without clamping.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field, replace
from typing import Literal

from ._kernels import euler_step
from .config import COMPARISON_TOL, DEFAULT_DT_FACTOR, INVARIANT_TOL
from .errors import CflViolation, DomainError, GridMismatch
from .model import Grid, ModelParams, StatePair, competitive_leq

logger = logging.getLogger(__name__)

Monitor = Callable[[StatePair], None]

_MULTIPLE_TOL = 1e-12


@dataclass(frozen=True)
class BoundaryCondition:
    """Closure at one end of the truncated domain."""

    kind: Literal["neumann_zero", "dirichlet"] = "neumann_zero"
    u_val: float = 0.0
    v_val: float = 0.0

    @property
    def is_neumann(self) -> bool:
        return self.kind == "neumann_zero"

    def as_dict(self) -> dict[str, object]:
        if self.is_neumann:
            return {"kind": self.kind}
        return {"kind": self.kind, "u": self.u_val, "v": self.v_val}


NEUMANN = BoundaryCondition()


def dirichlet(u_val: float, v_val: float) -> BoundaryCondition:
    return BoundaryCondition("dirichlet", float(u_val), float(v_val))


@dataclass(frozen=True)
class SolverConfig:
    """Numerics of one integration.

    ``snapshot_every`` must be an integer multiple of ``dt``; use
    :meth:`build` to pick a stable dt that divides the cadence.
    """

    grid: Grid
    dt: float
    t_end: float
    left_bc: BoundaryCondition = NEUMANN
    right_bc: BoundaryCondition = NEUMANN
    snapshot_every: float = 1.0
    delta: float = 0.0

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0:
            raise DomainError(f"t_end must be nonnegative, got {self.t_end}")
        if not self.snapshot_every > 0:
            raise DomainError(
                f"snapshot_every must be positive, got {self.snapshot_every}"
            )
        k = self.snapshot_every / self.dt
        if abs(k - round(k)) > _MULTIPLE_TOL * max(1.0, k):
            raise DomainError(
                f"snapshot_every={self.snapshot_every} "
                f"is not a multiple of dt={self.dt}"
            )

    @classmethod
    def build(
        cls,
        grid: Grid,
        p: ModelParams,
        t_end: float,
        dt: float | None = None,
        snapshot_every: float = 1.0,
        left_bc: BoundaryCondition = NEUMANN,
        right_bc: BoundaryCondition = NEUMANN,
        delta: float = 0.0,
    ) -> SolverConfig:
        """Config whose dt defaults to the largest cadence divisor below 0.9·CFL."""
        if dt is None:
            target = DEFAULT_DT_FACTOR * cfl_limit(grid, p)
            dt = snapshot_every / math.ceil(snapshot_every / target)
        return cls(grid, dt, t_end, left_bc, right_bc, snapshot_every, delta)

    @property
    def steps_per_snapshot(self) -> int:
        return int(round(self.snapshot_every / self.dt))

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.t_end / self.dt - 1e-9))

    def with_t_end(self, t_end: float) -> SolverConfig:
        return replace(self, t_end=t_end)


@dataclass(frozen=True, eq=False)
class Trajectory:
    snapshots: list[StatePair]
    config: SolverConfig
    params: ModelParams = field(repr=False)

    @property
    def times(self) -> list[float]:
        return [s.t for s in self.snapshots]

    @property
    def final(self) -> StatePair:
        return self.snapshots[-1]

    def max_invariant_violation(self) -> float:
        """Largest excursion of u or v outside [0, 1] over all snapshots."""
        worst = 0.0
        for s in self.snapshots:
            for w in (s.u, s.v):
                worst = max(worst, float(-w.min()), float(w.max() - 1.0))
        return worst


def cfl_limit(g: Grid, p: ModelParams) -> float:
    """Largest dt keeping the explicit scheme inside the invariant region."""
    diffusion = g.dx * g.dx / (2.0 * max(1.0, p.d))
    reaction = 1.0 / (4.0 * max(1.0, p.r * (p.b + 1.0)))
    return min(diffusion, reaction)


def _check_cfl(cfg: SolverConfig, p: ModelParams) -> None:
    limit = cfl_limit(cfg.grid, p)
    if cfg.dt > limit * (1.0 + 1e-12):
        raise CflViolation(cfg.dt, limit)


def _advance(s: StatePair, p: ModelParams, cfg: SolverConfig, t: float) -> StatePair:
    u, v = euler_step(
        s.u,
        s.v,
        cfg.dt,
        cfg.grid.dx,
        p.d,
        p.r,
        p.a,
        p.b,
        cfg.delta,
        cfg.left_bc.is_neumann,
        cfg.right_bc.is_neumann,
    )
    return StatePair(t=t, u=u, v=v, grid=cfg.grid)


def apply_boundary_values(s: StatePair, cfg: SolverConfig) -> StatePair:
    """Impose Dirichlet values on the boundary nodes of s."""
    if cfg.left_bc.is_neumann and cfg.right_bc.is_neumann:
        return s
    u, v = s.u.copy(), s.v.copy()
    if not cfg.left_bc.is_neumann:
        u[0], v[0] = cfg.left_bc.u_val, cfg.left_bc.v_val
    if not cfg.right_bc.is_neumann:
        u[-1], v[-1] = cfg.right_bc.u_val, cfg.right_bc.v_val
    return s.with_fields(s.t, u, v)


def step(s: StatePair, p: ModelParams, cfg: SolverConfig) -> StatePair:
    """Advance s by one time step dt.

    Raises:
        CflViolation: If cfg.dt exceeds the stability limit.
        GridMismatch: If s does not live on cfg.grid.
    """
    if s.grid != cfg.grid:
        raise GridMismatch("state and solver config use different grids")
    _check_cfl(cfg, p)
    return _advance(s, p, cfg, s.t + cfg.dt)


def integrate(
    s0: StatePair,
    p: ModelParams,
    cfg: SolverConfig,
    monitors: Iterable[Monitor] = (),
) -> Trajectory:
    """Integrate from s0 to s0.t + cfg.t_end.

    Time is computed as s0.t + n·dt, so it carries no accumulated rounding.
    Snapshots are taken every ``snapshot_every`` and at the final time;
    every monitor sees every snapshot and may raise to abort the run.

    Raises:
        CflViolation: If cfg.dt exceeds the stability limit.
        DomainEscape: Raised by a front monitor.
    """
    if s0.grid != cfg.grid:
        raise GridMismatch("initial state and solver config use different grids")
    _check_cfl(cfg, p)
    monitors = list(monitors)
    s = apply_boundary_values(s0, cfg)
    snapshots = [s]
    for monitor in monitors:
        monitor(s)

    n_steps, every = cfg.n_steps, cfg.steps_per_snapshot
    logger.debug(
        f"integrating {n_steps} steps of dt={cfg.dt:.4g} on {cfg.grid.n} nodes, "
        f"snapshot every {every} steps"
    )
    for n in range(1, n_steps + 1):
        s = _advance(s, p, cfg, s0.t + n * cfg.dt)
        if n % every == 0 or n == n_steps:
            snapshots.append(s)
            for monitor in monitors:
                monitor(s)
    return Trajectory(snapshots=snapshots, config=cfg, params=p)


def comparison_monitor(
    traj_sub: Trajectory, traj_super: Trajectory, tol: float = COMPARISON_TOL
) -> bool:
    """True iff traj_sub ⪯ traj_super at every common snapshot.

    Raises:
        GridMismatch: If the trajectories use different grids, configs or params.
    """
    if traj_sub.config != traj_super.config or traj_sub.params != traj_super.params:
        raise GridMismatch("trajectories differ in grid, config or parameters")
    first_sub, first_super = traj_sub.snapshots[0], traj_super.snapshots[0]
    if not competitive_leq(first_sub, first_super, tol):
        logger.warning("comparison monitor: initial data are not ordered")
        return False
    for lo, hi in zip(traj_sub.snapshots[1:], traj_super.snapshots[1:], strict=True):
        if not competitive_leq(lo, hi, tol):
            logger.debug(f"comparison monitor: ordering lost at t={lo.t:g}")
            return False
    return True


def within_invariant_region(traj: Trajectory, tol: float = INVARIANT_TOL) -> bool:
    return traj.max_invariant_violation() <= tol

