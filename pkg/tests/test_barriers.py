"""Tests for barrier blocks, interfaces, assemblies and certification."""

import math

import numpy as np
import pytest

from terrace_lab.barriers import (
    BLOCK_KINDS,
    BarrierKind,
    InterfaceId,
    Junction,
    Piece,
    PiecewiseField,
    assemble,
    build_block,
    certify_residuals,
    find_interface,
    h_star,
    interface_rows,
    min_length_alpha,
    min_radius_omega,
    place_terrace_pair,
    plateau_length_alpha,
)
from terrace_lab.barriers.blocks import (
    existence_threshold,
    pi_block,
    principal_eigenvalue,
)
from terrace_lab.barriers.certify import residuals
from terrace_lab.barriers.interfaces import linear_interface
from terrace_lab.barriers.placement import x_v_interval
from terrace_lab.errors import DomainError, HypothesisViolated, NoBracket, NotAdmissible
from terrace_lab.model import Grid, ModelParams
from terrace_lab.seeds import sandwiched_by, terrace_pair
from terrace_lab.speeds import lambda_u

X = np.linspace(-20.0, 20.0, 81)


# =============================================================================
# Closed-Form Block Tests
# =============================================================================


def test_block_registry():
    """Test that every advertised kind is buildable by name."""
    kinds = {"chi", "pi_h", "omega", "alpha", "theta", "beta", "wbar", "wunder", "z"}
    assert kinds <= set(BLOCK_KINDS)
    block = build_block("exponential", rate=0.5, speed=1.0)
    assert block.at(2.0, 2.0) == pytest.approx(1.0)


def test_build_block_errors():
    """Test unknown kinds and bad parameters."""
    with pytest.raises(DomainError):
        build_block("gaussian")
    with pytest.raises(DomainError):
        build_block("exponential", slope=1.0)
    with pytest.raises(DomainError):
        build_block("exponential", rate=-1.0)


def test_wbar_solves_linear_heat_equation():
    """Test that ∂t w̄ - ∂xx w̄ = w̄ for the unperturbed w̄."""
    block = build_block("wbar", c=1.8, ct=3.0, a=0.5)
    for t in (0.0, 2.0, 7.5):
        j = block.jet(t, X + 3.0 * t)
        assert np.allclose(j.heat(), j.value, rtol=1e-10, atol=0.0)


def test_theta_solves_its_ode(p_star):
    """Test -dθ'' - cθ' = rθ(1-δ-b) and θ(0) = 0."""
    block = build_block("theta", c=1.9, p=p_star, delta=0.02, log_a=3.0)
    j = block.jet(0.0, X)
    rhs = p_star.r * j.value * (1.0 - 0.02 - p_star.b)
    assert np.allclose(j.heat(p_star.d), rhs, rtol=1e-9, atol=1e-9)
    assert block.value_at(0.0) == pytest.approx(0.0, abs=1e-12)


def test_z_block_solves_linear_equation():
    """Test ∂t z - ∂xx z = (1-δ)z inside the support of z."""
    block = build_block("z", c=1.51795, ct=2.32016, a=0.5, delta=0.02)
    xs = np.linspace(0.1, 2.0 * block.radius - 0.1, 50)
    j = block.jet(0.0, xs)
    assert np.allclose(j.heat(), 0.98 * j.value, rtol=1e-9, atol=1e-14)
    assert block.at(0.0, -1.0) == 0.0


def test_z_block_range_checks():
    """Test that c̃ ≥ f(c) or a large δ is refused."""
    with pytest.raises(DomainError):
        build_block("z", c=1.8, ct=2.5, a=0.5, delta=0.01)
    with pytest.raises(DomainError):
        build_block("z", c=1.51795, ct=2.32016, a=0.5, delta=0.2)


def test_eigenpair_block():
    """Test -dψ'' = μψ on (-4R, 4R) and zero outside."""
    block = build_block("eigenpair", radius=2.0, d=1.5)
    xs = np.linspace(-7.9, 7.9, 41)
    j = block.jet(0.0, xs)
    assert np.allclose(-1.5 * j.dxx, block.eigenvalue * j.value)
    assert block.at(0.0, 9.0) == 0.0


def test_beta_block_shape(p_star):
    """Test that β vanishes for ξ ≤ 0 and peaks where its slope vanishes."""
    block = build_block("beta", c=3.0, p=p_star, eta=0.2, log_b=-math.inf)
    assert block.value_at(-1.0) == 0.0
    z, top = block.peak()
    assert top > 0.0
    assert block.slope_at(z) == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(DomainError):
        build_block("beta", c=2.0, p=p_star, eta=0.2, log_b=0.0)


def test_wunder_block_vanishes_at_its_edge():
    """Test that w̲ is zero at c̃t and positive just right of it."""
    block = build_block("wunder", c=1.8, ct=3.0, a=0.5, amplitude=1.0, eta=0.2)
    for t in (0.0, 5.0):
        assert block.at(t, 3.0 * t) == 0.0
        assert block.at(t, 3.0 * t + 1.0) > 0.0
        assert math.log(block.at(t, 3.0 * t + block.peak_offset)) == pytest.approx(
            block.log_peak(t)
        )


# =============================================================================
# ODE-Backed Block Tests
# =============================================================================


def test_chi_front_normalization():
    """Test χ(0) = (1-a)/4, monotonicity and the inverse."""
    chi = build_block("chi", c=1.8, a=0.5)
    assert chi.value_at(0.0) == pytest.approx(0.125, rel=1e-8)
    values = chi(0.0, X)
    assert np.all(np.diff(values) < 0)
    assert chi.front.inverse(chi.value_at(5.0)) == pytest.approx(5.0, abs=1e-7)


def test_chi_tail_rate():
    """Test that χ decays like e^{-λ(c)ξ} with λ for K = (1-a)/2 far out."""
    chi = build_block("chi", c=1.8, a=0.5)
    y = chi.log_value(np.array([150.0, 250.0]))
    rate = -(y[1] - y[0]) / 100.0
    k = 0.25
    assert rate == pytest.approx((1.8 - math.sqrt(1.8**2 - 4 * k)) / 2, rel=1e-3)


def test_min_length_alpha():
    """Test L_α = π/√(1-a)."""
    assert min_length_alpha(0.5) == pytest.approx(4.44288, abs=1e-3)
    assert plateau_length_alpha(0.5) > min_length_alpha(0.5)
    with pytest.raises(DomainError):
        min_length_alpha(1.0)


def test_min_radius_omega(p_star):
    """Test that R_ω matches the eigenvalue threshold and R_δ lies beyond it."""
    delta = 0.02
    drift = 2.0 * math.sqrt(1.21 * (1 - delta)) - delta
    net = 1.21 * (1 - delta) - drift * drift / 4.0
    r_omega, r_delta = min_radius_omega(p_star, delta)
    assert r_omega == pytest.approx(math.pi / (2.0 * math.sqrt(net)), rel=1e-12)
    assert r_omega == pytest.approx(10.6685, rel=0.01)
    assert r_delta > r_omega
    with pytest.raises(DomainError):
        min_radius_omega(p_star, 1.5)


def test_principal_eigenvalue_changes_sign_at_threshold():
    """Test that the Dirichlet eigenvalue vanishes at the existence length."""
    d, drift, growth = 1.0, 2.157888, 1.1858
    length = existence_threshold(d, drift, growth)
    mu = principal_eigenvalue(length, d, drift, growth)
    assert mu == pytest.approx(0.0, abs=1e-12)
    assert principal_eigenvalue(0.9 * length, d, drift, growth) > 0
    assert principal_eigenvalue(1.1 * length, d, drift, growth) < 0
    with pytest.raises(DomainError):
        existence_threshold(d, 2.2, 1.21)


def test_h_star(p_star):
    """Test that the π_h peak meets 1-2δ at h★."""
    hs = h_star(3.0, p_star, 0.02)
    assert hs == pytest.approx(1.15e-3, rel=0.1)
    assert pi_block(3.0, p_star, 0.02, hs).peak()[1] == pytest.approx(0.96, abs=1e-7)
    assert pi_block(3.0, p_star, 0.02, 2.0 * hs).peak()[1] < 0.96
    with pytest.raises(DomainError):
        h_star(2.0, p_star, 0.02)


# =============================================================================
# Interface & Piecewise Field Tests
# =============================================================================


def test_find_interface_direction():
    """Test that the crossing of two exponentials is found with the right junction."""
    left = build_block("exponential", rate=1.0)
    right = build_block("exponential", rate=2.0, shift=1.0)
    x = find_interface(left, right, InterfaceId.X2, 0.0, (0.0, 5.0), Junction.MIN)
    assert x == pytest.approx(2.0, abs=1e-9)
    with pytest.raises(NoBracket) as exc_info:
        find_interface(left, right, InterfaceId.X2, 0.0, (0.0, 5.0), Junction.MAX)
    assert exc_info.value.interface == "x2"
    with pytest.raises(NoBracket):
        find_interface(left, right, InterfaceId.X2, 0.0, (5.0, 0.0))


def test_piecewise_field_pieces_and_caps():
    """Test piece selection by interface and the clamp of a capped piece."""
    cut = linear_interface(InterfaceId.XI1, 0.0, 1.0, Junction.MAX)
    f = PiecewiseField(
        (
            Piece("left", build_block("exponential", rate=1.0), cap=1.0),
            Piece("right", build_block("exponential", rate=2.0)),
        ),
        (cut,),
    )
    j = f.evaluate(0.0, np.array([-2.0, 1.0]))
    assert j.value[0] == 1.0 and j.dx[0] == 0.0
    assert j.value[1] == pytest.approx(math.exp(-2.0))
    assert f.evaluate(3.0, np.array([2.0])).value[0] == pytest.approx(math.exp(-2.0))
    with pytest.raises(DomainError):
        PiecewiseField((Piece("only", build_block("exponential", rate=1.0)),), (cut,))


# =============================================================================
# Assembly Tests
# =============================================================================


@pytest.fixture(scope="module")
def terrace_sub_pair():
    """Terrace sub-solution pair at P*, (c1, c2) = (3, 1.8).

    Returns:
        BarrierAssembly: Assembled with δ = 0.02.
    """
    p = ModelParams(1.0, 1.21, 0.5, 1.1)
    return assemble("terrace_sub", p, {"c1": 3.0, "c2": 1.8}, 0.02)


def test_terrace_sub_constants(terrace_sub_pair):
    """Test the constructive constants of the terrace sub-solution."""
    k = terrace_sub_pair.constants
    assert k["eta"] == pytest.approx(0.2401, abs=1e-3)
    assert k["q"] == pytest.approx(0.382, abs=2e-3)
    assert k["K_w"] == pytest.approx(3.07, rel=0.01)
    assert k["X_w"] == pytest.approx(1.433, rel=0.01)
    assert k["max_jump"] <= 1e-8
    assert k["lambda"] == pytest.approx(lambda_u(1.8, 0.5))


def test_terrace_sub_summary_and_interfaces(terrace_sub_pair):
    """Test the summary payload and the x0 interface samples."""
    summary = terrace_sub_pair.summary()
    assert summary["which"] == "terrace_sub"
    assert summary["speeds"] == {"c1": 3.0, "c2": 1.8}
    assert set(summary["interfaces"]) == {"x0"}
    times = np.linspace(0.0, 10.0, 5)
    rows = interface_rows(terrace_sub_pair, times)
    assert len(rows) == 5
    for t, x, name in rows:
        assert name == "x0"
        assert 3.0 * t < x < 3.0 * t + terrace_sub_pair.constants["X_w"]


def test_terrace_sub_initial_fields(terrace_sub_pair):
    """Test that the initial barrier fields are continuous and in range."""
    g = Grid.from_spacing(-20.0, 60.0, 0.1)
    s = terrace_sub_pair.initial_fields(g)
    assert np.all(s.u >= 0.0) and np.all(s.v <= 1.0)
    assert np.max(np.abs(np.diff(s.u))) < 0.05


def test_residual_signs_on_a_coarse_lattice(terrace_sub_pair):
    """Test that the sub-solution residuals have the right sign on a coarse lattice."""
    report = certify_residuals(terrace_sub_pair, lattice=(11, 400), t_end=10.0)
    assert report.which == "terrace_sub"
    assert report.worst() is not None
    assert report.certified
    data = report.as_dict()
    assert data["lattice"] == [11, 400]
    assert {m["piece"] for m in data["margins"]} == {"chi", "w_under", "v_bar"}


def test_residuals_evaluate_both_equations(terrace_sub_pair):
    """Test that residuals return one value per sample for each equation."""
    n1, n2 = residuals(terrace_sub_pair, 1.0, np.linspace(-5.0, 5.0, 11))
    assert n1.shape == n2.shape == (11,)


def test_assemble_rejects_bad_delta(p_star):
    """Test that δ outside (0, 1/2) is a violated hypothesis."""
    with pytest.raises(HypothesisViolated):
        assemble("terrace_super", p_star, {"c1": 3.0, "c2": 1.8}, 0.6)


def test_assemble_rejects_terrace_super_with_large_delta(p_star):
    """Test that δ = 0.4 breaks the ordering c2 < c2δ < c1."""
    with pytest.raises(HypothesisViolated):
        assemble("terrace_super", p_star, {"c1": 3.0, "c2": 1.8}, 0.4)


def test_assemble_rejects_non_interior_pair(p_star):
    """Test that a lower-bound-violating pair cannot carry a terrace barrier."""
    with pytest.raises(NotAdmissible) as exc_info:
        assemble("terrace_super", p_star, {"c1": 2.3, "c2": 1.5}, 0.02)
    assert exc_info.value.klass == "lower_bound_violated"


def test_assemble_argument_errors(p_star):
    """Test missing speeds and unknown auxiliary constants."""
    with pytest.raises(DomainError):
        assemble("terrace_sub", p_star, {"c2": 1.8}, 0.02)
    with pytest.raises(DomainError):
        assemble(
            "terrace_sub", p_star, {"c1": 3.0, "c2": 1.8}, 0.02, aux={"gamma": 1.0}
        )
    with pytest.raises(ValueError):
        assemble("terrace_middle", p_star, {"c1": 3.0, "c2": 1.8}, 0.02)


def test_nonexistence_needs_small_c2(p_star):
    """Test that c2 ≥ f⁻¹(c1) is refused by the nonexistence construction."""
    with pytest.raises(HypothesisViolated):
        assemble("nonexistence_sub", p_star, {"c1": 2.3, "c2": 1.6}, 0.02)
    with pytest.raises(HypothesisViolated):
        assemble("nonexistence_sub", p_star, {"c1": 2.3, "c2": 1.5}, 0.1)


def test_nonexistence_sub_speeds(p_star):
    """Test the intermediate speeds (c, c̃) of the nonexistence construction."""
    asm = assemble("nonexistence_sub", p_star, {"c1": 2.3, "c2": 1.5}, 0.02)
    assert asm.which is BarrierKind.NONEXISTENCE_SUB
    assert asm.speeds["c"] == pytest.approx(1.51795, abs=1e-5)
    assert asm.speeds["c_tilde"] == pytest.approx(2.32016, abs=1e-5)
    assert not asm.which.is_super


# =============================================================================
# Placement Tests
# =============================================================================


def test_x_v_interval_from_exponential_bounds():
    """Test the x_v bounds when v̲ and v̄ are shifted copies of the v0 tail."""
    x = np.linspace(-10.0, 30.0, 401)
    v_under = np.minimum(0.9, 0.5 * np.exp(-(x - 3.0)))
    v_over = np.minimum(1.0, 2.0 * np.exp(-(x - 5.0)))
    lo, hi = x_v_interval(x, v_under, v_over, 1.0)
    assert lo == pytest.approx(3.0 - math.log(2.0), abs=1e-12)
    assert hi == pytest.approx(5.0 + math.log(2.0), abs=1e-12)
    for x_v in (lo, 4.0, hi):
        v0 = np.minimum(1.0, np.exp(-(x - x_v)))
        assert np.all(v_under <= v0 + 1e-12) and np.all(v0 <= v_over + 1e-12)


def test_x_v_interval_edge_cases():
    """Test an unbounded side and a vanishing v̄."""
    x = np.linspace(0.0, 10.0, 11)
    lo, hi = x_v_interval(x, np.zeros(11), np.ones(11), 1.0)
    assert (lo, hi) == (-math.inf, math.inf)
    lo, hi = x_v_interval(x, np.zeros(11), np.where(x < 5.0, 1.0, 0.0), 1.0)
    assert lo > hi


@pytest.mark.slow
def test_terrace_pair_is_placed_between_barriers(p_star):
    """Test that the placed pair lies between the shifted terrace barriers."""
    g = Grid.from_spacing(-50.0, 150.0, 0.1)
    placement = place_terrace_pair(g, p_star, 3.0, 1.8, delta=0.02)
    lo, hi = placement.x_v_interval
    assert lo <= placement.x_v <= hi
    assert placement.super_shift >= 0.0 and placement.sub_shift >= 0.0
    speeds = {"c1": 3.0, "c2": 1.8}
    upper = assemble("terrace_super", p_star, speeds, 0.02)
    lower = assemble("terrace_sub", p_star, speeds, 0.02)
    x = g.x
    u0, v0 = terrace_pair(g, p_star, 3.0, 1.8, x_v=placement.x_v)
    left = x + placement.sub_shift
    right = x - placement.super_shift
    assert sandwiched_by(
        u0,
        v0,
        (lower.u(0.0, left), lower.v(0.0, left)),
        (upper.u(0.0, right), upper.v(0.0, right)),
    )
    assert placement.as_dict()["delta"] == 0.02


# =============================================================================
# Certification Tests
# =============================================================================


@pytest.mark.slow
def test_terrace_super_is_certified(p_star):
    """Test the full terrace super-solution at P* on the default lattice."""
    asm = assemble("terrace_super", p_star, {"c1": 3.0, "c2": 1.8}, 0.02)
    k = asm.constants
    assert asm.speeds["c2_delta"] == pytest.approx(1.885701, abs=1e-5)
    assert k["Lambda_delta"] == pytest.approx(0.568579, abs=1e-5)
    assert k["h_star"] == pytest.approx(1.15e-3, rel=0.1)
    assert k["max_jump"] <= 1e-8
    report = certify_residuals(asm, threads=2)
    assert report.certified, report.as_dict()


@pytest.mark.slow
def test_compact_super_is_certified(p_star):
    """Test the compactly supported super-solution for c2 = 1.7."""
    asm = assemble("compact_super", p_star, {"c2": 1.7}, 0.02)
    assert asm.constants["R"] > asm.constants["R_omega"]
    assert certify_residuals(asm, threads=2).certified


@pytest.mark.slow
@pytest.mark.parametrize(
    "which, speeds",
    [
        ("terrace_sub", {"c1": 3.0, "c2": 1.8}),
        ("nonexistence_sub", {"c1": 2.3, "c2": 1.5}),
    ],
)
def test_sub_solutions_are_certified(p_star, which, speeds):
    """Test the two sub-solution pairs on the default lattice."""
    asm = assemble(which, p_star, speeds, 0.02)
    assert certify_residuals(asm).certified
