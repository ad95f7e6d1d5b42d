"""Functionals, recovery sequences, continuity, lsc, relaxation, blow-ups."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pairinglab.bv import BvFunction1D, CantorPart, JumpPoint, Piecewise1D
from pairinglab.errors import (AssumptionViolation, GapAboveTolerance,
                               InequalityViolated)
from pairinglab.fields import field_catalog
from pairinglab.measures import SingularLadder, TestFunction1D
from pairinglab.variational import (ApproximatingSequence, Functionals,
                                    MollifiedBv1D, _kernel_cdf, _kernel_rho,
                                    blowup_density, continuity_check_Gphi,
                                    f_phi_smooth, liminf_tail, lsc_check,
                                    order_relation_check, relaxation_check,
                                    sigma_k_identity_check, truncate_bv)

DOMAIN = (-2.0, 2.0)


# ---------------------------------------------------------------------------
# smoothing kernel and recovery elements


def test_kernel_normalisation():
    assert abs(_kernel_cdf(1.0) - 1.0) < 1e-15
    assert abs(_kernel_cdf(-1.0)) < 1e-15
    assert abs(_kernel_cdf(0.0) - 0.5) < 1e-15
    # quartic bump value at the center: 15/16
    assert abs(_kernel_rho(0.0) - 15.0 / 16.0) < 1e-15
    assert _kernel_rho(1.0) == 0.0


def test_mollified_jump_midpoint_and_tails(u_jump):
    m = MollifiedBv1D(u_jump, 0.05)
    assert abs(m.value(np.array([0.3]))[0] - 0.7) < 1e-12
    xs = np.array([-1.0, 0.1, 0.6, 1.5])
    assert np.max(np.abs(m.value(xs) - u_jump.evaluate(xs))) < 1e-12


def test_mollified_derivative_consistent_with_value(u_mixed):
    m = MollifiedBv1D(u_mixed, 0.04)
    rng = np.random.default_rng(1)
    xs = rng.uniform(-1.9, 1.9, 25)
    h = 1e-7
    num = (m.value(xs + h) - m.value(xs - h)) / (2.0 * h)
    assert np.max(np.abs(num - m.derivative(xs))) < 1e-5


def test_mollified_l1_gap_shrinks(u_jump):
    gaps = [MollifiedBv1D(u_jump, e).l1_gap()
            for e in (0.08, 0.04, 0.02, 0.01)]
    assert all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
    # the L1 gap of a smoothed unit jump is O(eps)
    assert gaps[-1] < 0.01


def test_mollified_total_variation_matches_base(u_stair):
    m = MollifiedBv1D(u_stair, 0.03)
    assert abs(m.total_variation() - u_stair.total_variation()) < 1e-6


# ---------------------------------------------------------------------------
# functionals and order relations


def test_functionals_constant_field_jump(u_jump):
    fn = Functionals(field_catalog("const", c=-1.5), window=None)
    assert abs(fn.G(u_jump) + 1.5) < 1e-9
    assert abs(fn.F(u_jump) - 1.5) < 1e-9
    assert abs(fn.Gplus(u_jump) - 0.0) < 1e-9


def test_functionals_g_phi_oracle(u_jump, phi_bump):
    fn = Functionals(field_catalog("gt"), window=None)
    atom = 1.0 + 0.5 * (math.cos(0.2) - math.cos(1.2))
    expect = atom * float(phi_bump(np.array([0.3]))[0])
    assert abs(fn.G_phi(u_jump, phi_bump) - expect) < 1e-8


def test_order_relations_mixed(u_mixed):
    for kind in ("const", "gt", "sep"):
        d = order_relation_check(field_catalog(kind), u_mixed)
        assert d["ok"]
        assert d["F"] >= d["Gplus"] - 1e-9
        assert d["Gplus"] >= max(d["G"], 0.0) - 1e-9


@given(c=st.floats(-2.0, 2.0))
@settings(max_examples=12, deadline=None)
def test_order_relation_constant_fields(c, u_stair):
    d = order_relation_check(field_catalog("const", c=c), u_stair)
    assert d["ok"]
    assert d["F"] >= abs(d["G"]) - 1e-9


# ---------------------------------------------------------------------------
# smooth functional values


def test_f_phi_smooth_ramp_oracle():
    ramp = Piecewise1D.from_callables(
        DOMAIN,
        lambda x: np.clip(x, 0.0, 1.0),
        lambda x: np.where((x > 0.0) & (x < 1.0), 1.0, 0.0),
        interior_breaks=(0.0, 1.0))
    u = BvFunction1D(DOMAIN, ac=ramp)
    phi = TestFunction1D.plateau(-1.8, -1.2, 1.2, 1.8)
    val = f_phi_smooth(field_catalog("const", c=2.0), u, phi, DOMAIN)
    assert abs(val - 2.0) < 1e-9


def test_f_phi_smooth_infinite_on_jump(u_jump, phi_bump):
    val = f_phi_smooth(field_catalog("const", c=1.0), u_jump, phi_bump,
                       DOMAIN)
    assert math.isinf(val)


def test_liminf_tail_uses_last_values():
    vals = [10.0, 9.0, 3.0, 2.0, 1.5, 1.2, 1.1, 1.05]
    assert liminf_tail(vals) == 1.05
    assert liminf_tail([5.0]) == 5.0


# ---------------------------------------------------------------------------
# continuity, lsc, relaxation, blow-up


def test_continuity_mollified_jump(u_jump, phi_bump):
    b = field_catalog("const", c=1.0)
    eps = tuple(0.03 * 0.5 ** i for i in range(8))
    seq = ApproximatingSequence.mollified(u_jump, eps)
    res = continuity_check_Gphi(b, phi_bump, seq, u_jump)
    expect = float(phi_bump(np.array([0.3]))[0])
    assert abs(res.target - expect) < 1e-9
    assert res.gaps[-1] <= 1e-5


def test_continuity_constant_sequence_exact(u_stair, phi_bump):
    b = field_catalog("gt")
    seq = ApproximatingSequence.constant(u_stair)
    res = continuity_check_Gphi(b, phi_bump, seq, u_stair)
    assert max(res.gaps) < 1e-12


def test_lsc_equality_for_mollified_jump(u_jump):
    b = field_catalog("const", c=1.0)
    eps = tuple(0.03 * 0.5 ** i for i in range(8))
    seq = ApproximatingSequence.mollified(u_jump, eps)
    res = lsc_check(b, "F", seq, u_jump)
    assert res.margin >= -1e-6
    assert abs(res.margin) <= 1e-5  # equality case
    assert res.truncation_k >= u_jump.sup_norm() + 1.0
    assert res.truncation_residual <= 1e-9


def test_lsc_strict_for_oscillation(u_smooth):
    b = field_catalog("sep")
    seq = ApproximatingSequence.oscillation(u_smooth,
                                            (4, 8, 16, 32, 64, 128))
    res = lsc_check(b, "F", seq, u_smooth)
    # the added oscillation inflates the variation, so liminf > target
    assert res.margin > 0.1


def test_lsc_oscillation_rejects_jumpy_base(u_jump):
    with pytest.raises(AssumptionViolation):
        ApproximatingSequence.oscillation(u_jump, (4, 8))


def test_lsc_raises_on_impossible_tolerance(u_jump):
    b = field_catalog("const", c=1.0)
    seq = ApproximatingSequence.mollified(u_jump, (0.2, 0.1))
    with pytest.raises(InequalityViolated):
        lsc_check(b, "F", seq, u_jump, tol=-1.0)


def test_relaxation_jump_scenario(u_jump, phi_bump):
    b = field_catalog("gt")
    eps = tuple(0.04 * 0.5 ** i for i in range(12))
    res = relaxation_check(b, u_jump, phi_bump, DOMAIN, eps)
    assert res.gap <= 1e-4
    for br in res.jump_report:
        assert br.mismatch <= 1e-3


def test_relaxation_carrier_needs_t_independent_field(u_cantor, phi_plateau):
    eps = tuple(0.04 * 0.5 ** i for i in range(12))
    with pytest.raises(AssumptionViolation):
        relaxation_check(field_catalog("gt"), u_cantor, phi_plateau,
                         DOMAIN, eps, with_blowups=False)


def test_relaxation_requires_long_schedule(u_jump, phi_bump):
    with pytest.raises(ValueError):
        relaxation_check(field_catalog("const", c=1.0), u_jump, phi_bump,
                         DOMAIN, (0.04, 0.02))


def test_blowup_at_jump_constant_field(u_jump):
    b = field_catalog("const", c=2.0)
    radii = tuple(0.02 * 0.5 ** i for i in range(6))
    br = blowup_density(b, u_jump, 0.3, radii)
    assert br.converged
    assert abs(br.extrapolated - 2.0) < 1e-10
    assert br.mismatch < 1e-10


def test_blowup_on_cantor_carrier(u_cantor):
    b = field_catalog("const", c=1.0)
    lad = u_cantor.cantor.ladder
    radii = tuple(1.0 * lad.side ** i for i in range(2, 8))
    br = blowup_density(b, u_cantor, 0.0, radii)
    assert br.converged
    assert br.mismatch < 1e-3


# ---------------------------------------------------------------------------
# truncation


def test_truncate_bv_clips_jump_function(u_stair):
    v = truncate_bv(u_stair, 2.0)
    xs = np.array([-1.0, 0.0, 1.5])
    np.testing.assert_allclose(v.evaluate(xs), [0.0, 1.0, 2.0])
    assert v.sup_norm() <= 2.0


def test_truncate_bv_rejects_cantor(u_cantor):
    with pytest.raises(AssumptionViolation):
        truncate_bv(u_cantor, 2.0)


@pytest.mark.parametrize("k", [2.0, 3.0])
def test_sigma_k_identities_staircase(k, u_stair, phi_bump):
    # staircase values reach 2.5, beyond level k - 1 for both k
    assert u_stair.sup_norm() > k - 1.0
    d = sigma_k_identity_check(field_catalog("xt"), u_stair, k,
                               phi=phi_bump)
    assert d["diffuse"] <= 1e-6
    assert d["jump"] <= 1e-6
    assert d["g_invariance"] <= 1e-6
