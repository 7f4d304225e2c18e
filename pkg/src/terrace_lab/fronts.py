"""Level-set front tracking, speed fitting, plateaus and the hair-trigger wedge."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from .config import ESCAPE_CELLS, FRONT_LEVEL, MIN_FIT_SAMPLES, WINDOW_FRACTION
from .errors import DomainError, DomainEscape, EmptyWedge, TooFewSamples
from .model import FloatArray, StatePair
from .solver import Monitor, Trajectory

logger = logging.getLogger(__name__)

Component = Literal["u", "v"]

SPREADING_NOTE = (
    "one level set is tracked; "
    "minimal and maximal spreading speeds are not distinguished"
)


@dataclass
class FrontTrack:
    """Rightmost crossings of a level over time; None where the level is absent."""

    level: float
    times: list[float] = field(default_factory=list)
    positions: list[float | None] = field(default_factory=list)

    def append(self, t: float, x: float | None) -> None:
        self.times.append(t)
        self.positions.append(x)


@dataclass(frozen=True)
class SpeedReport:
    fitted_speed: float
    intercept: float
    fit_window: tuple[float, float]
    rms_residual: float
    n_samples: int
    predicted: float | None = None
    relative_error: float | None = None
    note: str = SPREADING_NOTE

    def within(self, rel_tol: float) -> bool:
        return self.relative_error is not None and self.relative_error <= rel_tol

    def as_dict(self) -> dict[str, object]:
        data = asdict(self)
        data["fit_window"] = list(self.fit_window)
        return data


def _field(s: StatePair, which: Component) -> FloatArray:
    if which == "u":
        return s.u
    if which == "v":
        return s.v
    raise DomainError(f"unknown component {which!r}")


def level_position(
    s: StatePair, which: Component, level: float = FRONT_LEVEL
) -> float | None:
    """Rightmost x where the field crosses ``level``, linearly interpolated.

    Returns None when the level is never crossed.
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    d = _field(s, which) - level
    above = d > 0
    crossings = np.flatnonzero(above[:-1] != above[1:])
    if crossings.size == 0:
        return None
    i = int(crossings[-1])
    x = s.grid.x
    return float(x[i] + (x[i + 1] - x[i]) * d[i] / (d[i] - d[i + 1]))


def track_fronts(
    traj: Trajectory, level: float = FRONT_LEVEL
) -> tuple[FrontTrack, FrontTrack]:
    """Front tracks of u and v over every snapshot."""
    tu, tv = FrontTrack(level), FrontTrack(level)
    for s in traj.snapshots:
        tu.append(s.t, level_position(s, "u", level))
        tv.append(s.t, level_position(s, "v", level))
    return tu, tv


def fit_speed(
    track: FrontTrack,
    window_fraction: float = WINDOW_FRACTION,
    predicted: float | None = None,
    min_samples: int = MIN_FIT_SAMPLES,
) -> SpeedReport:
    """Least-squares line through the late part of a front track.

    Args:
        track: Front positions over time.
        window_fraction: Fraction of the time range, counted from the end,
            used for the fit.
        predicted: Optional speed to compare against.
        min_samples: Minimum number of finite positions inside the window.

    Raises:
        TooFewSamples: If times are not strictly increasing or the window
            holds fewer than ``min_samples`` finite positions.
    """
    times = np.asarray(track.times, dtype=float)
    if times.size < 2 or np.any(np.diff(times) <= 0):
        raise TooFewSamples("front track times must be strictly increasing")
    if not 0.0 < window_fraction <= 1.0:
        raise DomainError(f"window_fraction must lie in (0, 1], got {window_fraction}")
    t0 = times[-1] - window_fraction * (times[-1] - times[0])
    pairs = [
        (t, x)
        for t, x in zip(track.times, track.positions, strict=True)
        if t >= t0 and x is not None
    ]
    if len(pairs) < min_samples:
        raise TooFewSamples(
            f"{len(pairs)} samples with a front in [{t0:g}, {times[-1]:g}], "
            f"need {min_samples}"
        )
    t, x = np.array(pairs).T
    slope, intercept = np.polyfit(t, x, 1)
    resid = x - (slope * t + intercept)
    rel = None if predicted is None else abs(slope - predicted) / abs(predicted)
    return SpeedReport(
        fitted_speed=float(slope),
        intercept=float(intercept),
        fit_window=(float(t[0]), float(t[-1])),
        rms_residual=float(np.sqrt(np.mean(resid * resid))),
        n_samples=len(pairs),
        predicted=predicted,
        relative_error=rel,
    )


def _plateau_mask(s: StatePair, target: tuple[float, float], eps: float) -> np.ndarray:
    if not 0.0 < eps < 0.5:
        raise DomainError(f"eps must lie in (0, 0.5), got {eps}")
    return np.abs(s.u - target[0]) + np.abs(s.v - target[1]) < eps


def plateau_extent(
    s: StatePair, target: tuple[float, float], eps: float
) -> tuple[float, float] | None:
    """Maximal [0, X] (on the nodes x ≥ 0) where |u-u*| + |v-v*| < eps.

    Returns None when the first node at or right of 0 already fails.
    """
    mask = _plateau_mask(s, target, eps)
    x = s.grid.x
    start = int(np.searchsorted(x, 0.0))
    if start >= x.size or not mask[start]:
        return None
    failing = np.flatnonzero(~mask[start:])
    end = x.size - 1 if failing.size == 0 else start + int(failing[0]) - 1
    return 0.0, float(x[end])


def plateau_intervals(
    s: StatePair, target: tuple[float, float], eps: float
) -> list[tuple[float, float]]:
    """All maximal node intervals where |u-u*| + |v-v*| < eps, left to right."""
    mask = _plateau_mask(s, target, eps).astype(np.int8)
    x = s.grid.x
    edges = np.diff(np.concatenate(([0], mask, [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return [(float(x[i]), float(x[j])) for i, j in zip(starts, ends, strict=True)]


def wedge_check(
    traj: Trajectory, c_lo: float, c_hi: float, eps_geom: float, eps_val: float
) -> bool:
    """Whether (u, v) ≈ (0, 1) on [(c_lo+eps)t, (c_hi-eps)t] at the final snapshot.

    Raises:
        EmptyWedge: If the wedge holds no grid node at the final time.
    """
    s = traj.final
    lo, hi = (c_lo + eps_geom) * s.t, (c_hi - eps_geom) * s.t
    if not lo < hi:
        raise EmptyWedge(f"wedge [{lo:g}, {hi:g}] is empty at t={s.t:g}")
    x = s.grid.x
    if hi > x[-1]:
        logger.warning(f"wedge right end {hi:g} clipped to grid end {x[-1]:g}")
    inside = (x >= lo) & (x <= hi)
    if not np.any(inside):
        raise EmptyWedge(f"no grid node in wedge [{lo:g}, {hi:g}] at t={s.t:g}")
    worst = float(np.max(np.abs(s.u[inside]) + np.abs(s.v[inside] - 1.0)))
    logger.debug(f"wedge [{lo:g}, {hi:g}] at t={s.t:g}: sup |u| + |v-1| = {worst:.3e}")
    return worst < eps_val


def sup_field(s: StatePair, which: Component) -> float:
    return float(np.max(_field(s, which)))


def escape_monitor(cells: int = ESCAPE_CELLS, level: float = FRONT_LEVEL) -> Monitor:
    """Monitor raising DomainEscape when a front is within ``cells`` nodes of an end."""

    def check(s: StatePair) -> None:
        margin = cells * s.grid.dx
        for which in ("u", "v"):
            pos = level_position(s, which, level)
            if pos is None:
                continue
            if pos > s.grid.x_max - margin or pos < s.grid.x_min + margin:
                raise DomainEscape(
                    s.t,
                    pos,
                    f"{which}-front at x={pos:g} is within {cells} cells "
                    "of the boundary",
                )

    return check
