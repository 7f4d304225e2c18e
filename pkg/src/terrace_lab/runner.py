"""Scenario execution, analysis evaluation and sweep cells."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import artifacts
from .barriers import TerracePlacement, place_terrace_pair
from .config import (
    DEFAULT_DX,
    DOMAIN_PADDING,
    DOMAIN_SIZE_FACTOR,
    INVARIANT_TOL,
    SPEED_REL_TOL,
    WINDOW_FRACTION,
)
from .errors import BoundaryCase, ConfigError, DomainError, TerraceLabError
from .fronts import (
    FrontTrack,
    escape_monitor,
    fit_speed,
    plateau_intervals,
    sup_field,
    track_fronts,
    wedge_check,
)
from .model import Grid, ModelParams, StatePair
from .scenario import Analysis, Scenario
from .seeds import SeedSpec, realize_field, realize_pair, terrace_pair
from .solver import SolverConfig, Trajectory, integrate
from .speeds import (
    Admissibility,
    SpeedPrediction,
    admissible,
    linear_determinacy,
    predict_trichotomy,
)
from .ui import StepTracker

logger = logging.getLogger(__name__)

SWEEP_MIN_SAMPLES = 5


@dataclass
class AnalysisResult:
    """Outcome of one declared analysis; ``passed`` is None for report-only entries."""

    name: str
    passed: bool | None
    measured: dict[str, Any] = field(default_factory=dict)


@dataclass
class RunSummary:
    scenario: str
    predictions: dict[str, Any] | None
    analyses: list[AnalysisResult]
    invariant_violation: float
    wall_clock: float = math.nan
    artifacts: list[str] = field(default_factory=list)
    placement: TerracePlacement | None = None

    @property
    def criteria(self) -> dict[str, bool]:
        return {a.name: a.passed for a in self.analyses if a.passed is not None}

    @property
    def passed(self) -> bool:
        return all(self.criteria.values())

    def as_dict(self, timing: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "scenario": self.scenario,
            "predictions": self.predictions,
            "measured": {a.name: a.measured for a in self.analyses},
            "criteria": self.criteria,
            "passed": self.passed,
            "invariant_violation": self.invariant_violation,
            "artifacts": sorted(self.artifacts),
        }
        if self.placement is not None:
            out["placement"] = self.placement.as_dict()
        if timing:
            out["wall_clock_s"] = self.wall_clock
        return out


def prediction_for(sc: Scenario) -> SpeedPrediction | None:
    """Trichotomy prediction; None for an unknown c_LLW or a boundary case."""
    expected = sc.expected or {}
    c_llw = expected.get("c_llw") or linear_determinacy(sc.params).c_llw
    if c_llw is None:
        logger.warning(f"{sc.name}: c_LLW unknown, no trichotomy prediction")
        return None
    try:
        return predict_trichotomy(sc.params, float(c_llw))
    except (BoundaryCase, DomainError) as e:
        logger.warning(f"{sc.name}: no prediction ({e})")
        return None


def place_seed(
    spec: SeedSpec, g: Grid, p: ModelParams
) -> tuple[SeedSpec, TerracePlacement]:
    """Resolve ``"x_v": "auto"`` of a terrace_pair seed against the barriers.

    Raises:
        ConfigError: If the seed lacks a speed.
        HypothesisViolated: If the barriers cannot sandwich the pair on the grid.
    """
    o = dict(spec.options)
    try:
        placement = place_terrace_pair(
            g,
            p,
            o["c1"],
            o["c2"],
            delta=o.get("delta"),
            c_llw=o.get("c_llw"),
            u_cap=o.get("u_cap", 1.0),
        )
    except KeyError as e:
        raise ConfigError(
            str(e.args[0]), f"missing option for seed kind {spec.kind}"
        ) from e
    return SeedSpec(spec.kind, {**o, "x_v": placement.x_v}), placement


def initial_state(
    sc: Scenario, cfg: SolverConfig
) -> tuple[StatePair, TerracePlacement | None]:
    """Initial pair of a scenario, with the placement of an auto-placed terrace pair."""
    g = cfg.grid
    placement = None
    if "pair" in sc.seeds:
        spec = sc.seeds["pair"]
        if spec.kind == "terrace_pair" and spec.options.get("x_v") == "auto":
            spec, placement = place_seed(spec, g, sc.params)
        u0, v0 = realize_pair(spec, g, sc.params)
    else:
        u0, v0 = realize_field(sc.seeds["u"], g), realize_field(sc.seeds["v"], g)
    return StatePair(0.0, u0, v0, g), placement


def _predicted_speed(
    sc: Scenario, a: Analysis, component: str, prediction: SpeedPrediction | None
) -> float | None:
    if a.get("predicted") is not None:
        return float(a.get("predicted"))
    key = "c1" if component == "v" else "c2"
    expected = sc.expected or {}
    if key in expected:
        return float(expected[key])
    if prediction is None:
        return None
    return prediction.c1_star if component == "v" else prediction.c2_star


def evaluate_analysis(
    sc: Scenario,
    a: Analysis,
    traj: Trajectory,
    tracks: dict[str, FrontTrack],
    prediction: SpeedPrediction | None,
) -> AnalysisResult:
    """Evaluate one analysis on a finished trajectory.

    Raises:
        TooFewSamples: If a speed fit has too few front positions.
        EmptyWedge: If a wedge holds no grid node.
    """
    final = traj.final
    if a.kind == "speed":
        component = a.get("component")
        track = tracks[component]
        if a.get("level") is not None:
            u_track, v_track = track_fronts(traj, float(a.get("level")))
            track = u_track if component == "u" else v_track
        predicted = _predicted_speed(sc, a, component, prediction)
        report = fit_speed(track, a.get("window_fraction", WINDOW_FRACTION), predicted)
        measured = report.as_dict()
        if a.get("min_speed") is not None:
            passed: bool | None = report.fitted_speed >= float(a.get("min_speed"))
            measured["min_speed"] = float(a.get("min_speed"))
        elif predicted is not None:
            passed = report.within(float(a.get("rel_tol", SPEED_REL_TOL)))
        else:
            passed = None
        return AnalysisResult(f"speed_{component}", passed, measured)
    if a.kind == "plateau":
        target = (float(a.get("target")[0]), float(a.get("target")[1]))
        intervals = plateau_intervals(final, target, float(a.get("eps")))
        longest = max((hi - lo for lo, hi in intervals), default=0.0)
        passed = bool(intervals) and longest >= float(a.get("min_extent", 0.0))
        return AnalysisResult(
            "plateau",
            passed,
            {"intervals": [list(i) for i in intervals], "longest": longest},
        )
    if a.kind == "wedge":
        ok = wedge_check(
            traj,
            float(a.get("c_lo")),
            float(a.get("c_hi")),
            float(a.get("eps_geom")),
            float(a.get("eps_val")),
        )
        return AnalysisResult("wedge", ok, {"t": final.t})
    if a.kind == "sup_v":
        sup = sup_field(final, "v")
        return AnalysisResult(
            "sup_v", sup < float(a.get("max")), {"sup_v": sup, "t": final.t}
        )
    if a.kind == "invariant":
        worst = traj.max_invariant_violation()
        return AnalysisResult(
            "invariant",
            worst <= float(a.get("tol", INVARIANT_TOL)),
            {"violation": worst},
        )
    raise DomainError(f"unknown analysis kind {a.kind!r}")


def _unique_names(results: list[AnalysisResult]) -> None:
    seen: dict[str, int] = {}
    for r in results:
        n = seen.get(r.name, 0)
        seen[r.name] = n + 1
        if n:
            r.name = f"{r.name}_{n + 1}"


def run_scenario(
    sc: Scenario, out_dir: Path | None = None, tracker: StepTracker | None = None
) -> RunSummary:
    """Integrate a scenario, evaluate its analyses and optionally write artifacts.

    Raises:
        TerraceLabError: Propagated from the solver or an analysis.
    """
    start = time.perf_counter()
    if tracker:
        tracker.start("setup")
    cfg = sc.solver.build(sc.params)
    s0, placement = initial_state(sc, cfg)
    prediction = prediction_for(sc)
    if tracker:
        detail = f"{cfg.grid.n} nodes, dt={cfg.dt:.4g}"
        if placement is not None:
            detail += f", x_v={placement.x_v:.4g}"
        tracker.complete("setup", detail)
        tracker.start("integrate")
    traj = integrate(s0, sc.params, cfg, monitors=[escape_monitor()])
    if tracker:
        tracker.complete(
            "integrate", f"t={traj.final.t:g}, {len(traj.snapshots)} snapshots"
        )
        tracker.start("analyze")

    u_track, v_track = track_fronts(traj)
    tracks = {"u": u_track, "v": v_track}
    results = [evaluate_analysis(sc, a, traj, tracks, prediction) for a in sc.analyses]
    _unique_names(results)
    summary = RunSummary(
        scenario=sc.name,
        predictions=None if prediction is None else prediction.as_dict(),
        analyses=results,
        invariant_violation=traj.max_invariant_violation(),
        placement=placement,
    )
    if tracker:
        if summary.passed:
            tracker.complete("analyze", "all criteria met")
        else:
            failed = [k for k, ok in summary.criteria.items() if not ok]
            tracker.error("analyze", ", ".join(failed))

    if out_dir is not None:
        if tracker:
            tracker.start("write")
        paths = [
            artifacts.write_fronts(out_dir, u_track, v_track),
            artifacts.write_field(out_dir, traj.snapshots[0]),
            artifacts.write_field(out_dir, traj.final),
        ]
        summary.artifacts = [p.name for p in paths] + [artifacts.SUMMARY_FILE]
    summary.wall_clock = time.perf_counter() - start
    if out_dir is not None:
        artifacts.write_summary(out_dir, summary.as_dict())
        if tracker:
            tracker.complete("write", str(out_dir))
    return summary


# =============================================================================
# Sweeps
# =============================================================================


@dataclass(frozen=True)
class SweepCell:
    """One (c1, c2) cell of a region sweep; picklable for process pools."""

    c1: float
    c2: float
    params: ModelParams
    c_llw: float
    simulate: bool = False
    t_end: float = 60.0
    dx: float = DEFAULT_DX


def measure_terrace_speeds(
    p: ModelParams,
    c1: float,
    c2: float,
    t_end: float,
    dx: float = DEFAULT_DX,
    c_llw: float | None = None,
) -> tuple[float, float]:
    """Fitted (v, u) front speeds from a terrace_pair seed."""
    g = Grid.from_spacing(-50.0, DOMAIN_SIZE_FACTOR * c1 * t_end + DOMAIN_PADDING, dx)
    u0, v0 = terrace_pair(g, p, c1, c2, c_llw=c_llw)
    cfg = SolverConfig.build(g, p, t_end)
    traj = integrate(StatePair(0.0, u0, v0, g), p, cfg, monitors=[escape_monitor()])
    u_track, v_track = track_fronts(traj)
    return (
        fit_speed(v_track, min_samples=SWEEP_MIN_SAMPLES).fitted_speed,
        fit_speed(u_track, min_samples=SWEEP_MIN_SAMPLES).fitted_speed,
    )


def sweep_cell(cell: SweepCell) -> tuple[float, float, str, float | None, float | None]:
    """Row ``c1, c2, class, measured_c1, measured_c2`` of region.csv."""
    try:
        klass = admissible(cell.c1, cell.c2, cell.params, cell.c_llw)
    except DomainError:
        klass = Admissibility.LOWER_BOUND_VIOLATED
    m1 = m2 = None
    if cell.simulate and klass is Admissibility.INTERIOR:
        try:
            m1, m2 = measure_terrace_speeds(
                cell.params, cell.c1, cell.c2, cell.t_end, cell.dx, cell.c_llw
            )
        except TerraceLabError as e:
            logger.warning(f"cell ({cell.c1:g}, {cell.c2:g}): simulation failed: {e}")
    return cell.c1, cell.c2, klass.value, m1, m2


def trichotomy_row(
    p: ModelParams, c_llw: float | None
) -> tuple[str, float | None, float | None]:
    """(case, c1*, c2*) for one parameter point of a parameter sweep."""
    if c_llw is None:
        c_llw = linear_determinacy(p).c_llw
    if c_llw is None:
        return "unknown_c_llw", None, None
    try:
        pred = predict_trichotomy(p, c_llw)
    except BoundaryCase:
        return "boundary", None, None
    return pred.case_id.value, pred.c1_star, pred.c2_star
