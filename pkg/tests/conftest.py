"""Shared pytest fixtures for terrace-lab tests."""

import copy
import json
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from terrace_lab.config import PARAM_SETS
from terrace_lab.model import Grid, ModelParams, StatePair
from terrace_lab.seeds import bump, heaviside_like
from terrace_lab.solver import SolverConfig, Trajectory, integrate


# =============================================================================
# Parameter Fixtures
# =============================================================================


@pytest.fixture
def p_star() -> ModelParams:
    """Accelerated-invasion parameters (1, 1.21, 0.5, 1.1).

    Returns:
        ModelParams: 2 < 2√(rd) = 2.2 < f(c_LLW).
    """
    return ModelParams(**PARAM_SETS["p_star"])


@pytest.fixture
def p_llw() -> ModelParams:
    """Parameters (1, 9, 0.5, 1.1) where the second front moves at c_LLW.

    Returns:
        ModelParams: 2√(rd) = 6 ≥ f(c_LLW).
    """
    return ModelParams(**PARAM_SETS["p_llw"])


@pytest.fixture
def p_extinction() -> ModelParams:
    """Parameters (1, 0.25, 0.5, 1.1) where v dies out.

    Returns:
        ModelParams: 2√(rd) = 1 < 2.
    """
    return ModelParams(**PARAM_SETS["p_extinction"])


# =============================================================================
# Grid & Trajectory Fixtures
# =============================================================================


@pytest.fixture
def small_grid() -> Grid:
    """Coarse grid for quick solver runs.

    Returns:
        Grid: [-20, 100] with spacing 0.2.
    """
    return Grid.from_spacing(-20.0, 100.0, 0.2)


@pytest.fixture
def invasion_state(small_grid: Grid) -> StatePair:
    """u on the left half-line, v a compact bump just ahead of it.

    Args:
        small_grid: Grid to realize the seeds on.

    Returns:
        StatePair: Initial state at t = 0.
    """
    u0 = heaviside_like(small_grid, 0.0)
    v0 = bump(small_grid, 5.0, 5.0)
    return StatePair(0.0, u0, v0, small_grid)


@pytest.fixture
def short_trajectory(invasion_state: StatePair, p_star: ModelParams) -> Trajectory:
    """A 20-time-unit run of the invasion state under P*.

    Args:
        invasion_state: Initial state.
        p_star: Model parameters.

    Returns:
        Trajectory: Snapshots every 1.0 time unit.
    """
    cfg = SolverConfig.build(invasion_state.grid, p_star, 20.0)
    return integrate(invasion_state, p_star, cfg)


# =============================================================================
# Scenario Fixtures
# =============================================================================


_QUICK_SCENARIO: dict[str, Any] = {
    "schema_version": 1,
    "name": "quick",
    "params": {"d": 1.0, "r": 1.21, "a": 0.5, "b": 1.1},
    "seeds": {
        "u": {"kind": "heaviside_like", "edge": 0.0},
        "v": {"kind": "bump", "center": 5.0, "halfwidth": 5.0},
    },
    "solver": {"x_min": -20.0, "x_max": 100.0, "dx": 0.2, "t_end": 20.0},
    "analyses": [
        {"kind": "speed", "component": "v", "rel_tol": 0.5},
        {"kind": "invariant"},
    ],
}


@pytest.fixture
def scenario_data() -> dict[str, Any]:
    """A small valid scenario document that runs in about a second.

    Returns:
        dict: Fresh copy, safe to mutate.
    """
    return copy.deepcopy(_QUICK_SCENARIO)


@pytest.fixture
def scenario_file(tmp_path: Path, scenario_data: dict[str, Any]) -> Path:
    """The quick scenario written to a JSON file.

    Args:
        tmp_path: pytest temporary directory.
        scenario_data: Scenario document.

    Returns:
        Path: Path of the written file.
    """
    path = tmp_path / "quick.json"
    path.write_text(json.dumps(scenario_data, indent=2), encoding="utf-8")
    return path


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded random generator.

    Returns:
        np.random.Generator: Deterministic across runs.
    """
    return np.random.default_rng(20240611)
