"""Full-length runs of the bundled scenarios against the predicted speeds."""

import math

import pytest

from terrace_lab.runner import run_scenario
from terrace_lab.scenario import bundled, load
from terrace_lab.speeds import f_inverse

pytestmark = pytest.mark.slow


def _run(name: str):
    summary = run_scenario(load(bundled(name)))
    speeds = {
        a.name: a.measured["fitted_speed"]
        for a in summary.analyses
        if a.name.startswith("speed")
    }
    return summary, speeds


# =============================================================================
# Trichotomy Tests
# =============================================================================


def test_accelerated_second_front():
    """Test (c1, c2) = (2.2, f⁻¹(2.2)) with the u front well above 2√(1-a)."""
    summary, speeds = _run("trichotomy_case2")
    assert summary.passed, summary.as_dict(timing=False)
    assert speeds["speed_v"] == pytest.approx(2.2, rel=0.03)
    assert speeds["speed_u"] == pytest.approx(1.6655036, rel=0.03)
    assert speeds["speed_u"] >= 1.1 * math.sqrt(2.0)
    assert summary.wall_clock < 60.0


def test_second_front_at_c_llw():
    """Test (c1, c2) = (6, √2) when 2√(rd) exceeds f(c_LLW)."""
    summary, speeds = _run("trichotomy_case3")
    assert summary.passed, summary.as_dict(timing=False)
    assert speeds["speed_v"] == pytest.approx(6.0, rel=0.03)
    assert speeds["speed_u"] == pytest.approx(math.sqrt(2.0), rel=0.03)


def test_extinction_of_slow_invader():
    """Test that v dies out and u spreads at 2 when 2√(rd) < 2."""
    summary, speeds = _run("trichotomy_case1")
    assert summary.passed, summary.as_dict(timing=False)
    measured = {a.name: a.measured for a in summary.analyses}
    assert measured["sup_v"]["sup_v"] < 0.01
    assert speeds["speed_u"] == pytest.approx(2.0, rel=0.03)


def test_hair_trigger_wedge():
    """Test that v fills the (2t, 6t) wedge at t = 60."""
    summary, _ = _run("hair_trigger")
    assert summary.criteria == {"wedge": True}


# =============================================================================
# Terrace & Lower Bound Tests
# =============================================================================


def test_terrace_speeds():
    """Test that the terrace seed spreads at (3, 1.8) with a (0, 1) plateau between."""
    summary, speeds = _run("terrace")
    assert summary.passed, summary.as_dict(timing=False)
    assert summary.placement is not None
    assert summary.placement.super_shift >= 0.0
    assert speeds["speed_v"] == pytest.approx(3.0, rel=0.03)
    assert speeds["speed_u"] == pytest.approx(1.8, rel=0.03)


def test_second_front_lower_bound():
    """Test c2 ≥ 0.97 f⁻¹(2.3) when v carries a λ_v(2.3) tail."""
    summary, speeds = _run("nonexistence")
    assert summary.criteria["speed_u"], summary.as_dict(timing=False)
    assert speeds["speed_u"] >= 0.97 * f_inverse(2.3, 0.5)
