"""Quadrature helpers, 1D/2D Radon measures, ladders, test functions."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pairinglab.measures import (Circle, DiscPatch, RadonMeasure1D,
                                 RadonMeasure2D, Segment, SingularLadder,
                                 TestFunction1D, TestFunction2D)
from pairinglab.quadrature import (adaptive_simpson, aitken, circle_integral,
                                   composite_gauss, find_sign_changes,
                                   integrate_abs, polar_quad, polygon_quad,
                                   segment_integral)


# ---------------------------------------------------------------------------
# quadrature


def test_adaptive_simpson_sine():
    assert abs(adaptive_simpson(np.sin, 0.0, math.pi) - 2.0) < 1e-11


def test_adaptive_simpson_with_kink_breakpoint():
    f = lambda x: np.abs(x - 0.3)
    exact = 0.5 * (0.3 ** 2 + 0.7 ** 2)
    assert abs(adaptive_simpson(f, 0.0, 1.0, breakpoints=(0.3,))
               - exact) < 1e-12


def test_integrate_abs_sine_full_period():
    assert abs(integrate_abs(np.sin, 0.0, 2.0 * math.pi) - 4.0) < 1e-9


def test_find_sign_changes_locates_roots():
    roots = find_sign_changes(np.cos, 0.0, 2.0 * math.pi)
    expect = (math.pi / 2.0, 3.0 * math.pi / 2.0)
    assert len(roots) == 2
    assert all(abs(r - e) < 1e-9 for r, e in zip(sorted(roots), expect))


def test_aitken_accelerates_geometric_tail():
    partial = np.cumsum([0.5 ** k for k in range(8)])
    assert abs(aitken(list(partial)) - 2.0) < 1e-12


def test_composite_gauss_polynomial_exact():
    val = composite_gauss(lambda x: x ** 5 - x, -1.0, 2.0)
    assert abs(val - (2.0 ** 6 - 1.0) / 6.0 + (4.0 - 1.0) / 2.0) < 1e-11


def test_polar_quad_area_and_moment():
    assert abs(polar_quad(lambda p: np.ones(p.shape[:-1]),
                          (0.0, 0.0), 0.0, 1.0) - math.pi) < 1e-10
    # int over unit disc of x^2 = pi/4
    val = polar_quad(lambda p: p[..., 0] ** 2, (0.0, 0.0), 0.0, 1.0)
    assert abs(val - math.pi / 4.0) < 1e-9


def test_polygon_quad_unit_square():
    verts = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))
    val = polygon_quad(lambda p: p[..., 0] * p[..., 1], verts)
    assert abs(val - 0.25) < 1e-10


def test_circle_integral_constant_and_kinked():
    assert abs(circle_integral(lambda p: np.ones(p.shape[:-1]),
                               (0.0, 0.0), 2.0) - 4.0 * math.pi) < 1e-9
    # |cos theta| has kinks at pi/2 and 3pi/2; breaks make it converge
    val = circle_integral(lambda p: np.abs(p[..., 0]), (0.0, 0.0), 1.0,
                          theta_breaks=(math.pi / 2.0, 3.0 * math.pi / 2.0))
    assert abs(val - 4.0) < 1e-9


def test_segment_integral_linear_density():
    val = segment_integral(lambda p: p[..., 0], (0.0, 0.0), (3.0, 4.0))
    assert abs(val - 1.5 * 5.0) < 1e-10


# ---------------------------------------------------------------------------
# singular ladders


def test_ladder_classical_values():
    lad = SingularLadder((0.0, 1.0))
    xs = np.array([0.0, 0.5, 1.0, 1.0 / 4.0, 3.0 / 4.0])
    vals = lad.evaluate(xs)
    # F(1/4) = 1/3 and F(3/4) = 2/3 for the classical middle-thirds ladder
    expect = np.array([0.0, 0.5, 1.0, 1.0 / 3.0, 2.0 / 3.0])
    assert np.max(np.abs(vals - expect)) < 2.0 ** -lad.depth


def test_ladder_flat_on_removed_middle():
    lad = SingularLadder((0.0, 1.0))
    xs = np.linspace(1.0 / 3.0, 2.0 / 3.0, 11)
    assert np.max(np.abs(lad.evaluate(xs) - 0.5)) < 1e-12


def test_ladder_increments_mass_sums_to_one():
    lad = SingularLadder((0.0, 1.0), depth=10)
    lo, hi, _, mass = lad.increments()
    assert len(lo) == 2 ** 10
    assert abs(len(lo) * mass - 1.0) < 1e-12
    assert np.all(hi > lo)


def test_ladder_inverse_round_trip():
    lad = SingularLadder((0.0, 1.0))
    ts = np.linspace(0.01, 0.99, 23)
    back = lad.evaluate(lad.inverse(ts))
    assert np.max(np.abs(back - ts)) < 2.0 ** -lad.depth


@given(st.floats(0.05, 0.9))
@settings(max_examples=25, deadline=None)
def test_ladder_depth_convergence(removed):
    coarse = SingularLadder((0.0, 1.0), removed, depth=8)
    fine = SingularLadder((0.0, 1.0), removed, depth=16)
    xs = np.linspace(0.0, 1.0, 101)
    assert np.max(np.abs(coarse.evaluate(xs) - fine.evaluate(xs))) < 2.0 ** -8


# ---------------------------------------------------------------------------
# 1D measures


def _mix_measure():
    return RadonMeasure1D(
        (-1.0, 1.0),
        ac_density=lambda x: np.cos(x),
        atoms=((-0.5, 2.0), (0.25, -1.0)),
        ladder=SingularLadder((0.0, 0.8)),
        ladder_scale=0.5)


def test_measure1d_total_mass_closed_form():
    m = _mix_measure()
    expect = 2.0 * math.sin(1.0) + 2.0 - 1.0 + 0.5
    assert abs(m.total_mass() - expect) < 1e-9


def test_measure1d_variation_closed_form():
    m = _mix_measure()
    expect = 2.0 * math.sin(1.0) + 2.0 + 1.0 + 0.5
    assert abs(m.variation().total_mass() - expect) < 1e-9


def test_measure1d_restrict_half_open_atom_semantics():
    m = RadonMeasure1D((-1.0, 1.0), atoms=((0.0, 1.0),))
    assert abs(m.restrict((0.0, 0.5)).total_mass() - 1.0) < 1e-14
    assert abs(m.restrict((-0.5, 0.0)).total_mass()) < 1e-14


@given(st.floats(-0.99, 0.99), st.floats(-0.99, 0.99))
@settings(max_examples=40, deadline=None)
def test_measure1d_window_additivity(a, b):
    lo, hi = sorted((a, b))
    if hi - lo < 1e-6:
        return
    m = _mix_measure()
    left = m.restrict((-1.0, lo)).total_mass()
    mid = m.restrict((lo, hi)).total_mass()
    right = m.restrict((hi, 1.0)).total_mass()
    edge = m.restrict((1.0, 1.0 + 1e-9)).total_mass()  # right endpoint
    assert abs(left + mid + right + edge - m.total_mass()) < 1e-8


def test_measure1d_scaled():
    m = _mix_measure()
    assert abs(m.scaled(-2.0).total_mass() + 2.0 * m.total_mass()) < 1e-9


# ---------------------------------------------------------------------------
# 2D measures


def test_measure2d_surface_mass_and_variation():
    circ = Circle((0.0, 0.0), 1.0)
    m = RadonMeasure2D(
        ((-2.0, 2.0), (-2.0, 2.0)),
        surface_parts=((circ, lambda p: p[..., 0]),))
    # int cos over the circle is 0; variation integrates |cos| giving 4
    assert abs(m.total_mass()) < 1e-9
    assert abs(m.variation().total_mass() - 4.0) < 1e-8


def test_measure2d_area_part_and_restrict():
    m = RadonMeasure2D(
        ((-2.0, 2.0), (-2.0, 2.0)),
        ac_parts=((DiscPatch((0.0, 0.0), 1.0),
                   lambda p: np.ones(p.shape[:-1])),))
    assert abs(m.total_mass() - math.pi) < 1e-9
    half = m.restrict(((0.0, 2.0), (-2.0, 2.0))).total_mass()
    assert abs(half - math.pi / 2.0) < 1e-3


def test_measure2d_segment_part():
    seg = Segment((0.0, 0.0), (2.0, 0.0))
    m = RadonMeasure2D(
        ((-2.0, 2.0), (-2.0, 2.0)),
        surface_parts=((seg, lambda p: p[..., 0] - 1.0),))
    assert abs(m.total_mass()) < 1e-10
    assert abs(m.variation().total_mass() - 1.0) < 1e-8


# ---------------------------------------------------------------------------
# test functions


def test_bump_shape_and_gradient():
    phi = TestFunction1D.bump(-1.0, 1.0)
    assert phi(np.array([0.0]))[0] == 1.0
    assert phi(np.array([-1.0, 1.0, 2.0])).max() == 0.0
    xs = np.linspace(-0.95, 0.95, 41)
    h = 1e-6
    num = (phi(xs + h) - phi(xs - h)) / (2.0 * h)
    assert np.max(np.abs(num - phi.gradient(xs))) < 1e-7


def test_plateau_is_one_on_core():
    phi = TestFunction1D.plateau(-1.0, -0.5, 0.5, 1.0)
    xs = np.linspace(-0.5, 0.5, 21)
    assert np.max(np.abs(phi(xs) - 1.0)) == 0.0
    assert np.max(np.abs(phi.gradient(xs))) == 0.0
    assert phi(np.array([-1.0, 1.0])).max() == 0.0


def test_radial2d_plateau_and_annulus():
    phi = TestFunction2D.radial((0.0, 0.0), 1.0, 1.5)
    pts = np.array([[0.0, 0.0], [0.5, 0.5], [1.6, 0.0]])
    vals = phi(pts)
    assert vals[0] == 1.0 and vals[1] == 1.0 and vals[2] == 0.0
    ann = TestFunction2D.radial((0.0, 0.0), 1.0, 1.5, r_in0=0.1, r_in1=0.3)
    assert ann(np.array([[0.0, 0.0]]))[0] == 0.0
    assert ann(np.array([[0.5, 0.0]]))[0] == 1.0


def test_box2d_product_structure():
    phi = TestFunction2D.box((-1.0, 1.0), (-1.0, 1.0), margin=0.4)
    assert phi(np.array([[0.0, 0.0]]))[0] == 1.0
    assert phi(np.array([[1.0, 0.0]]))[0] == 0.0
    p = np.array([[-0.8, 0.1]])
    h = 1e-6
    gx = (phi(p + [[h, 0.0]]) - phi(p - [[h, 0.0]])) / (2.0 * h)
    assert abs(gx[0] - phi.gradient(p)[0, 0]) < 1e-6


def test_atoms_must_be_sorted():
    with pytest.raises(ValueError):
        RadonMeasure1D((-1.0, 1.0), atoms=((0.5, 1.0), (0.0, 1.0)))


def test_ladder_rejects_bad_removed_fraction():
    with pytest.raises(ValueError):
        SingularLadder((0.0, 1.0), removed=1.5)
