"""Tests for error handling across all modules."""

import math

import pytest

from terrace_lab.errors import (
    BandTooNarrow,
    BoundaryCase,
    CertificationFailed,
    CflViolation,
    ConfigError,
    DeltaTooLarge,
    DomainError,
    DomainEscape,
    EmptyWedge,
    GridMismatch,
    HypothesisViolated,
    NoBracket,
    NoConvergence,
    NotAdmissible,
    OutOfRegime,
    SubcriticalSpeed,
    SupportOutsideGrid,
    TerraceLabError,
    TooFewSamples,
)
from terrace_lab.model import ModelParams, validate_params
from terrace_lab.scenario import parse
from terrace_lab.seeds import terrace_pair
from terrace_lab.solver import SolverConfig, integrate
from terrace_lab.speeds import perturbed_speeds_terrace, predict_trichotomy

ALL_ERRORS = (
    OutOfRegime,
    DomainError,
    BoundaryCase,
    GridMismatch,
    CflViolation,
    DomainEscape,
    SupportOutsideGrid,
    NotAdmissible,
    TooFewSamples,
    EmptyWedge,
    NoConvergence,
    SubcriticalSpeed,
    BandTooNarrow,
    NoBracket,
    HypothesisViolated,
    CertificationFailed,
    DeltaTooLarge,
    ConfigError,
)


# =============================================================================
# Base Exception Tests
# =============================================================================


@pytest.mark.parametrize("error", ALL_ERRORS)
def test_terrace_lab_error_is_base_exception(error):
    """Test that TerraceLabError is the base for all custom exceptions."""
    assert issubclass(error, TerraceLabError)


def test_terrace_lab_error_can_be_caught():
    """Test that catching TerraceLabError catches the payload-carrying errors."""
    try:
        raise CflViolation(0.05, 0.02)
    except TerraceLabError:
        pass  # Should catch it

    try:
        raise NoBracket("x2", "no sign change")
    except TerraceLabError:
        pass  # Should catch it


# =============================================================================
# Payload Tests
# =============================================================================


def test_out_of_regime_payload():
    """Test that OutOfRegime names the first offending parameter."""
    with pytest.raises(OutOfRegime) as exc_info:
        validate_params(ModelParams(1.0, -1.0, 1.5, 1.1))
    assert exc_info.value.field == "r"
    assert exc_info.value.value == -1.0
    assert "r must be positive" in str(exc_info.value)


def test_out_of_regime_rejects_nan():
    """Test that NaN parameters are out of regime."""
    with pytest.raises(OutOfRegime) as exc_info:
        validate_params(ModelParams(math.nan, 1.0, 0.5, 1.1))
    assert exc_info.value.field == "d"


def test_cfl_violation_payload(invasion_state, p_star):
    """Test that CflViolation carries dt and the limit."""
    cfg = SolverConfig(invasion_state.grid, 0.1, 1.0)
    with pytest.raises(CflViolation) as exc_info:
        integrate(invasion_state, p_star, cfg)
    assert exc_info.value.dt == 0.1
    assert exc_info.value.limit < 0.1
    assert "CFL" in str(exc_info.value)


def test_not_admissible_payload(p_star, small_grid):
    """Test that NotAdmissible carries the pair and its class."""
    with pytest.raises(NotAdmissible) as exc_info:
        terrace_pair(small_grid, p_star, 2.3, 1.5)
    err = exc_info.value
    assert (err.c1, err.c2) == (2.3, 1.5)
    assert err.klass == "lower_bound_violated"
    assert "lower_bound_violated" in str(err)


def test_boundary_case_detail():
    """Test that BoundaryCase keeps its detail."""
    with pytest.raises(BoundaryCase) as exc_info:
        predict_trichotomy(ModelParams(1.0, 1.0, 0.5, 1.1), 2.0**0.5)
    assert "2√(rd)" in exc_info.value.detail


def test_delta_too_large_payload():
    """Test that DeltaTooLarge names δ and the failed condition."""
    with pytest.raises(DeltaTooLarge) as exc_info:
        perturbed_speeds_terrace(1.8, 3.0, 0.5, 0.4)
    assert exc_info.value.delta == 0.4
    assert exc_info.value.condition
    assert str(exc_info.value).startswith("delta=0.4 too large")


def test_config_error_payload(scenario_data):
    """Test that ConfigError keeps the field path and the offending value."""
    scenario_data["solver"]["dx"] = -0.1
    with pytest.raises(ConfigError) as exc_info:
        parse(scenario_data)
    assert exc_info.value.field == "solver.dx"
    assert exc_info.value.context == -0.1


def test_message_formats():
    """Test the messages built from structured payloads."""
    assert str(NoBracket("xi4", "blocks never cross")) == "xi4: blocks never cross"
    assert str(HypothesisViolated("κ < 1")) == "hypothesis violated: κ < 1"
    failed = CertificationFailed("chi", (1.0, 2.5), -3e-4)
    assert failed.point == (1.0, 2.5)
    assert "piece chi" in str(failed)
    assert "t=1" in str(failed) and "x=2.5" in str(failed)
    stalled = NoConvergence("newton", 0.5)
    assert stalled.last_residual == 0.5
    assert "5.000e-01" in str(stalled)
    escape = DomainEscape(3.0, 99.0)
    assert (escape.t, escape.position) == (3.0, 99.0)
