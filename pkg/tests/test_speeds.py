"""Tests for the closed-form speed and decay calculus."""

import math

import numpy as np
import pytest

from terrace_lab.errors import (
    BoundaryCase,
    DeltaTooLarge,
    DomainError,
    HypothesisViolated,
)
from terrace_lab.model import ModelParams
from terrace_lab.speeds import (
    Admissibility,
    CaseId,
    Side,
    a_delta,
    admissible,
    big_lambda,
    c_acc,
    c_llw_delta_bounds,
    decay_classify,
    delta_rescaled_params,
    delta_star,
    f_delta,
    f_inverse,
    f_of,
    lambda_minus_inf,
    lambda_minus_inf_delta,
    lambda_u,
    lambda_u_inverse,
    lambda_v,
    leading_decays,
    linear_determinacy,
    nonexistence_speeds,
    perturbed_speeds_compact,
    perturbed_speeds_terrace,
    predict_trichotomy,
    r_minus_inf,
    r_plus_inf,
    tail_rates,
    terrace_conditions,
    w_speed,
)

SQRT2 = math.sqrt(2.0)


# =============================================================================
# f and its inverse
# =============================================================================


def test_f_at_two_is_two():
    """Test that f(2) = 2 for a = 0.5."""
    assert f_of(2.0, 0.5) == pytest.approx(2.0, abs=1e-12)
    assert f_inverse(2.0, 0.5) == pytest.approx(2.0, abs=1e-12)


def test_f_endpoint():
    """Test f at the double-root speed 2√(1-a)."""
    assert f_of(SQRT2, 0.5) == pytest.approx(2.0 * (SQRT2 / 2 + SQRT2 / 2), abs=1e-7)
    assert f_inverse(2.0 * SQRT2, 0.5) == pytest.approx(SQRT2, abs=1e-9)


def test_f_reference_values():
    """Test f and f⁻¹ against reference values."""
    assert f_of(1.8, 0.5) == pytest.approx(2.100661, abs=1e-6)
    assert f_of(3.0, 0.5) == pytest.approx(1.768462, abs=1e-6)
    assert f_inverse(2.2, 0.5) == pytest.approx(1.6655036, abs=1e-6)


def test_f_inverse_round_trip():
    """Test that f⁻¹ ∘ f is the identity on a log-spaced grid."""
    for c in np.geomspace(SQRT2 * 1.0001, 50.0, 40):
        assert f_inverse(f_of(c, 0.5), 0.5) == pytest.approx(c, rel=1e-10)


def test_f_is_decreasing():
    """Test that f is strictly decreasing."""
    values = [f_of(c, 0.3) for c in np.linspace(2 * math.sqrt(0.7), 6.0, 50)]
    assert all(x > y for x, y in zip(values, values[1:]))


def test_f_domain_errors():
    """Test that f and f⁻¹ reject arguments outside their domains."""
    with pytest.raises(DomainError):
        f_of(1.0, 0.5)
    with pytest.raises(DomainError):
        f_inverse(1.0, 0.5)


# =============================================================================
# Decay rates
# =============================================================================


def test_lambda_u_values():
    """Test λ at the double root and at c = 1.8."""
    assert lambda_u(SQRT2, 0.5) == pytest.approx(math.sqrt(0.5), rel=1e-6)
    lam = lambda_u(1.8, 0.5)
    assert lam == pytest.approx(0.343224, abs=1e-6)
    assert lam * lam - 1.8 * lam + 0.5 == pytest.approx(0.0, abs=1e-14)


def test_lambda_u_increases_with_delta():
    """Test that λ_δ(c) grows with δ."""
    assert lambda_u(1.8, 0.5, 0.05) > lambda_u(1.8, 0.5)


def test_lambda_u_inverse_round_trip():
    """Test λ⁻¹ at the double root and as an inverse."""
    k = 1.0 - a_delta(0.5, 0.05)
    assert lambda_u_inverse(math.sqrt(k), 0.5, 0.05) == pytest.approx(2 * math.sqrt(k))
    assert lambda_u_inverse(lambda_u(1.8, 0.5), 0.5) == pytest.approx(1.8, rel=1e-12)
    assert lambda_u_inverse(lambda_u(1.8, 0.5), 0.5, 0.05) > 1.8
    with pytest.raises(DomainError):
        lambda_u_inverse(1.0, 0.5)


def test_lambda_v_values():
    """Test λ_v at the double root, at c = 3 and its monotonicity."""
    assert lambda_v(2.2, 1.21, 1.0) == pytest.approx(1.1, rel=1e-6)
    assert lambda_v(3.0, 1.21, 1.0) == pytest.approx(0.480196, abs=1e-6)
    assert lambda_v(3.0, 1.21, 1.0) > lambda_v(3.5, 1.21, 1.0)
    with pytest.raises(DomainError):
        lambda_v(2.0, 1.21, 1.0)


def test_big_lambda_values():
    """Test Λ at the discriminant zero and at (1.8, 3)."""
    fc = f_of(1.8, 0.5)
    assert big_lambda(1.8, fc, 0.5) == pytest.approx(fc / 2.0, rel=1e-6)
    big = big_lambda(1.8, 3.0, 0.5)
    assert big == pytest.approx(0.5845047, abs=1e-6)
    q = lambda_u(1.8, 0.5) * (3.0 - 1.8) + 1.0
    assert big * big - 3.0 * big + q == pytest.approx(0.0, abs=1e-12)


def test_big_lambda_exceeds_lambda():
    """Test that Λ(c, c̃) > λ(c) on sampled admissible pairs."""
    for c in np.linspace(1.5, 2.5, 6):
        for ct in np.linspace(max(c, f_of(c, 0.5)) + 0.1, 5.0, 6):
            assert big_lambda(c, ct, 0.5) > lambda_u(c, 0.5)


def test_w_speed_below_first_speed():
    """Test that (Λ² + 1)/Λ < c1 for admissible pairs."""
    for c2, c1 in [(1.8, 3.0), (1.6, 2.6), (2.0, 2.5)]:
        assert w_speed(c2, c1, 0.5) < c1


def test_big_lambda_rejects_low_ct():
    """Test that Λ is undefined below f(c)."""
    with pytest.raises(DomainError):
        big_lambda(1.8, 1.9, 0.5)


def test_a_delta_values():
    """Test a_δ at δ = 0, a reference value and its monotonicity."""
    assert a_delta(0.5, 0.0) == 0.5
    assert a_delta(0.5, 0.1) == pytest.approx(0.363636, abs=1e-6)
    values = [a_delta(0.5, d) for d in np.arange(0.0, 0.46, 0.05)]
    assert all(x > y for x, y in zip(values, values[1:]))


def test_f_delta_properties():
    """Test the δ = 0 reduction, a reference value and the sign identity."""
    for c in np.linspace(SQRT2, 4.0, 10):
        assert f_delta(c, 0.5, 0.0) == pytest.approx(f_of(c, 0.5), rel=1e-14)
    # a_δ < a, so f_δ > f at this speed
    assert f_delta(1.8, 0.5, 0.05) == pytest.approx(2.132432, abs=1e-6)
    assert f_delta(1.8, 0.5, 0.05) > f_of(1.8, 0.5)
    c, ct, delta = 1.8, 2.5, 0.05
    fd = f_delta(c, 0.5, delta)
    sa = math.sqrt(a_delta(0.5, delta))
    lhs = (ct - fd) * (ct - fd + 4 * sa)
    rhs = ct * ct - 4 * (lambda_u(c, 0.5, delta) * (ct - c) + 1)
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_c_acc_matches_f_inverse():
    """Test that c_acc = f⁻¹(2√(rd)) and lies above 2√(1-a)."""
    assert c_acc(1.21, 1.0, 0.5) == pytest.approx(1.6655036, abs=1e-6)
    assert c_acc(1.21, 1.0, 0.5) == pytest.approx(f_inverse(2.2, 0.5), rel=1e-12)
    assert c_acc(1.0, 1.0, 0.5) == pytest.approx(2.0)
    for r in np.linspace(1.05, 1.9, 8):
        assert c_acc(r, 1.0, 0.5) > SQRT2


def test_lambda_minus_inf_values(p_star):
    """Test the -∞ ψ-decay at c = 0 and c = 1.8."""
    expected = math.sqrt(1.21 * 0.1)
    assert lambda_minus_inf(0.0, p_star) == pytest.approx(expected, rel=1e-12)
    assert lambda_minus_inf(1.8, p_star) == pytest.approx(0.0648835, abs=1e-6)
    assert lambda_minus_inf_delta(1.8, p_star, 0.0) == lambda_minus_inf(1.8, p_star)
    assert lambda_minus_inf_delta(1.8, p_star, 0.02) > lambda_minus_inf(1.8, p_star)


def test_tail_rates_satisfy_polynomials(p_star):
    """Test that the tail rates are roots of their characteristic polynomials."""
    rates = tail_rates(1.8, p_star)
    assert rates["lambda1_plus"] == pytest.approx(2.321267, abs=1e-6)
    assert rates["lambda3_plus"] == pytest.approx(0.343224, abs=1e-6)
    assert r_minus_inf(rates["lambda1_minus"], 1.8) == pytest.approx(0.0, abs=1e-12)
    residual = r_plus_inf(rates["lambda1_plus"], 1.8, p_star)
    assert residual == pytest.approx(0.0, abs=1e-12)


def test_decay_classify_p_star(p_star):
    """Test the +∞ branch and leading decays at c = 1.8."""
    klass = decay_classify(1.8, p_star, Side.PLUS_INF)
    assert klass.case_label == "2a-v"
    assert klass.leading_rate("phi") == pytest.approx(lambda_u(1.8, 0.5))
    minus = decay_classify(1.8, p_star, "minus_inf")
    assert minus.rate("lambda2_minus") == lambda_minus_inf(1.8, p_star)


def test_decay_classify_double_root():
    """Test that c = 2√(1-a) selects a 2b branch."""
    p = ModelParams(1.0, 1.21, 0.75, 1.1)
    klass = decay_classify(1.0, p, Side.PLUS_INF)
    assert klass.case_label.startswith("2b")
    assert klass.polynomial_factor


def test_leading_decays_keys(p_star):
    """Test that leading_decays reports both sides and components."""
    out = leading_decays(1.8, p_star)
    assert set(out) == {
        "minus_inf.phi",
        "minus_inf.psi",
        "plus_inf.phi",
        "plus_inf.psi",
    }


# =============================================================================
# Linear determinacy and the trichotomy
# =============================================================================


def test_linear_determinacy_p_star(p_star):
    """Test that P* satisfies the LLW condition."""
    det = linear_determinacy(p_star)
    assert det.llw_condition
    assert det.c_llw == pytest.approx(SQRT2)


def test_linear_determinacy_d_two():
    """Test that d = 2 with ab ≤ 1 satisfies the LLW condition."""
    assert linear_determinacy(ModelParams(2.0, 3.0, 0.5, 1.5)).llw_condition


def test_huang_without_llw_exists():
    """Test that a coarse scan finds Huang-true, LLW-false parameters."""
    found = False
    for d in (0.5, 1.0, 1.5, 2.5, 3.0):
        for r in (0.5, 1.0, 2.0, 4.0):
            for a in (0.2, 0.5, 0.8):
                for b in (1.2, 2.0, 4.0):
                    det = linear_determinacy(ModelParams(d, r, a, b))
                    if det.huang_condition and not det.llw_condition:
                        found = True
    assert found


def test_predict_accelerated(p_star):
    """Test the accelerated case under P*."""
    pred = predict_trichotomy(p_star, SQRT2)
    assert pred.case_id is CaseId.ACCELERATED
    assert pred.c1_star == pytest.approx(2.2)
    assert pred.c2_star == pytest.approx(1.6655036, abs=1e-6)
    assert pred.c2_star > pred.c_llw_used
    assert pred.linearly_determined


def test_predict_llw(p_llw):
    """Test the LLW case."""
    pred = predict_trichotomy(p_llw, SQRT2)
    assert pred.case_id is CaseId.LLW
    assert pred.c1_star == pytest.approx(6.0)
    assert pred.c2_star == pytest.approx(SQRT2)


def test_predict_extinction(p_extinction):
    """Test the extinction case."""
    pred = predict_trichotomy(p_extinction, SQRT2)
    assert pred.case_id is CaseId.EXTINCTION
    assert pred.c2_star == 2.0


def test_predict_boundary_flagged():
    """Test that 2√(rd) = 2 is flagged, not classified."""
    with pytest.raises(BoundaryCase):
        predict_trichotomy(ModelParams(1.0, 1.0, 0.5, 1.1), SQRT2)


def test_predict_rejects_c_llw_out_of_range(p_star):
    """Test that c_LLW outside [2√(1-a), 2] is rejected."""
    with pytest.raises(DomainError):
        predict_trichotomy(p_star, 2.5)


def test_admissible_classes(p_star):
    """Test the interior, lower-bound and boundary classes."""
    assert admissible(3.0, 1.8, p_star, SQRT2) is Admissibility.INTERIOR
    assert admissible(2.3, 1.5, p_star, SQRT2) is Admissibility.LOWER_BOUND_VIOLATED
    assert admissible(2.5, 2.5, p_star, SQRT2) is Admissibility.BOUNDARY
    with pytest.raises(DomainError):
        admissible(2.0, 1.8, p_star, SQRT2)


def test_admissible_region_is_monotone_in_c1(p_star):
    """Test that raising c1 keeps an interior pair interior."""
    for c2 in np.linspace(1.5, 2.5, 6):
        c1s = np.linspace(2.25, 5.0, 12)
        classes = [admissible(c1, c2, p_star, SQRT2) for c1 in c1s]
        first = next(
            (i for i, k in enumerate(classes) if k is Admissibility.INTERIOR), None
        )
        if first is not None:
            assert all(k is Admissibility.INTERIOR for k in classes[first:])


# =============================================================================
# Perturbed speeds
# =============================================================================


def test_perturbed_terrace_speed():
    """Test c2^δ at P*, (3, 1.8), δ = 0.02 and its δ → 0 limit."""
    c2d = perturbed_speeds_terrace(1.8, 3.0, 0.5, 0.02)
    assert c2d == pytest.approx(1.885701, abs=1e-5)
    assert 1.8 < c2d < 3.0
    assert big_lambda(c2d, 3.0, 0.5, 0.02) < big_lambda(1.8, 3.0, 0.5)
    values = [perturbed_speeds_terrace(1.8, 3.0, 0.5, d) for d in (0.05, 0.02, 0.01)]
    assert values[0] > values[1] > values[2] > 1.8


def test_terrace_conditions_at_zero_delta():
    """Test that δ = 0 gives back c2."""
    report = terrace_conditions(1.8, 3.0, 0.5, 0.0)
    assert report.c2_delta == pytest.approx(1.8, rel=1e-12)


def test_perturbed_terrace_too_large_delta():
    """Test that a large δ is rejected."""
    with pytest.raises(DeltaTooLarge):
        perturbed_speeds_terrace(1.8, 3.0, 0.5, 0.4)


def test_perturbed_compact_speeds(p_star):
    """Test the compact-barrier speeds, their ordering and δ → 0 limit."""
    target = big_lambda(1.7, 2.2, 0.5)
    previous = None
    for delta in (0.05, 0.02, 0.01):
        c1d, c2d = perturbed_speeds_compact(1.7, p_star, delta)
        assert c1d == pytest.approx(2 * math.sqrt(1.21 * (1 - 2 * delta)) - delta)
        assert 1.7 < c2d < c1d < 2.2
        assert big_lambda(c2d, c1d, 0.5, delta) == pytest.approx(target, abs=1e-10)
        if previous is not None:
            assert c2d < previous
        previous = c2d


def test_perturbed_compact_rejects_c2(p_star):
    """Test that c2 outside its range is rejected."""
    with pytest.raises(DomainError):
        perturbed_speeds_compact(1.5, p_star, 0.02)


def test_c_llw_delta_bounds_and_rescaling(p_star):
    """Test the bounds on c_LLW^δ and the rescaled parameters."""
    lo, hi = c_llw_delta_bounds(0.5, 0.0)
    assert lo == pytest.approx(SQRT2)
    assert hi == 2.0
    q = delta_rescaled_params(p_star, 0.0)
    assert q == p_star


def test_nonexistence_speeds_ordering():
    """Test c2 < c < f⁻¹(c1) and c1 < c̃ < f(c)."""
    c, ct = nonexistence_speeds(2.3, 1.5, 0.5)
    assert 1.5 < c < f_inverse(2.3, 0.5)
    assert 2.3 < ct < f_of(c, 0.5)
    assert c == pytest.approx(1.51795, abs=1e-5)


def test_delta_star(p_star):
    """Test that δ* picks a candidate for the terrace and fails when none fit."""
    assert delta_star(p_star, 3.0, 1.8, "terrace") in (0.1, 0.05, 0.02, 0.01)
    with pytest.raises(HypothesisViolated):
        delta_star(p_star, 3.0, 1.8, "terrace", candidates=(0.45,))
