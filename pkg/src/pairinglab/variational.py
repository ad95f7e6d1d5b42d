"""Semicontinuity, continuity and relaxation checks for the pairing.

The functionals

    F(u)    = int_A |(b(x,u), Du)|
    G(u)    = int_A  (b(x,u), Du)
    G+(u)   = int_A  (b(x,u), Du)^+
    G_phi(u)= int_A  phi d(b(x,u), Du)

are evaluated through the ``pairing`` module for BV arguments, and by direct
quadrature for the smooth elements of an approximating sequence.  Recovery
sequences mollify the singular parts of a BV function with a polynomial
kernel whose antiderivative is available in closed form, so every element
carries an exactly consistent (value, derivative) pair.
"""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (AssumptionViolation, GapAboveTolerance,
                     InequalityViolated, NoApparentConvergence,
                     PairingLabError)
from .quadrature import (adaptive_simpson, aitken, find_sign_changes,
                         gauss_nodes, integrate_abs, polar_quad)
from .measures import SingularLadder
from .bv import (BvFunction1D, JumpPoint, Piecewise1D, PiecewiseConstantBv2D,
                 SmoothRadialBv2D, gradient_measure)
from .fields import FieldB, sigma_k, truncate
from .pairing import pairing_by_representation


# ---------------------------------------------------------------------------
# Polynomial mollification kernel (quartic, compactly supported on [-1, 1])


def _kernel_rho(t):
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1.0
    return np.where(inside, (15.0 / 16.0) * (1.0 - t * t) ** 2, 0.0)


def _kernel_cdf(t):
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    return 0.5 + (15.0 / 16.0) * (t - 2.0 * t ** 3 / 3.0 + t ** 5 / 5.0)


def _discrete_kernel(n=24):
    """Point-mass discretization of the kernel on [-1, 1], mass one."""
    y, w = gauss_nodes(-1.0, 1.0, n)
    c = w * _kernel_rho(y)
    return y, c / c.sum()


# ---------------------------------------------------------------------------
# Sequence elements


class MollifiedBv1D:
    """W^{1,1} recovery element for a 1D BV function.

    Jump steps and the Cantor part are smoothed with the quartic kernel at
    radius ``epsilon`` (the Cantor measure is first discretized into leaf
    point masses no wider than epsilon/4), while the absolutely continuous
    part is convolved with a point-mass discretization of the same kernel.
    Values and derivatives are consistent by construction.
    """

    def __init__(self, u: BvFunction1D, epsilon, n_ac=24, max_depth=14):
        self.base = u
        self.epsilon = float(epsilon)
        self.domain = u.domain
        self._ac = u.ac
        self._ac_nodes, self._ac_weights = _discrete_kernel(n_ac)
        self._steps = tuple((j.location, j.right_value - j.left_value)
                            for j in u.jumps)
        self.jump_windows = tuple(
            (x - self.epsilon, x + self.epsilon) for x, _ in self._steps)
        if u.cantor is not None:
            lad = u.cantor.ladder
            width = lad.interval[1] - lad.interval[0]
            side = lad.side
            d = 1
            while width * side ** d > self.epsilon / 4.0 and d < max_depth:
                d += 1
            fine = SingularLadder(lad.interval, lad.removed, depth=d)
            lo, hi, _, mass = fine.increments()
            self.leaf_mids = 0.5 * (lo + hi)
            self.leaf_mass = float(mass)
            self.cantor_scale = u.cantor.scale
            self.carrier_window = (lad.interval[0] - self.epsilon,
                                   lad.interval[1] + self.epsilon)
        else:
            self.leaf_mids = None
            self.leaf_mass = 0.0
            self.cantor_scale = 0.0
            self.carrier_window = None

    # -- kernels at radius epsilon

    def _rho(self, y):
        return _kernel_rho(np.asarray(y, float) / self.epsilon) / self.epsilon

    def _cdf(self, y):
        return _kernel_cdf(np.asarray(y, float) / self.epsilon)

    # -- component sums

    def _ac_value(self, x):
        if self._ac is None:
            return np.zeros(np.shape(x))
        shifted = x[..., None] - self.epsilon * self._ac_nodes
        return np.asarray(self._ac.evaluate(shifted)) @ self._ac_weights

    def _ac_deriv(self, x):
        if self._ac is None:
            return np.zeros(np.shape(x))
        shifted = x[..., None] - self.epsilon * self._ac_nodes
        return np.asarray(self._ac.derivative(shifted)) @ self._ac_weights

    def _cantor_sum(self, x, kernel, cumulative=False):
        out = np.zeros(x.shape)
        if self.leaf_mids is None:
            return out
        lo = self.leaf_mids[0] - self.epsilon
        hi = self.leaf_mids[-1] + self.epsilon
        if cumulative:
            out[x >= hi] = self.leaf_mass * self.leaf_mids.size
        mid = (x > lo) & (x < hi)
        idx = np.nonzero(mid)[0]
        for k in range(0, idx.size, 128):
            sel = idx[k:k + 128]
            out[sel] = self.leaf_mass * kernel(
                x[sel][:, None] - self.leaf_mids).sum(axis=1)
        return out

    def value(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = self._ac_value(flat)
        for xj, step in self._steps:
            out = out + step * self._cdf(flat - xj)
        out = out + self.cantor_scale * self._cantor_sum(flat, self._cdf,
                                                         cumulative=True)
        return out.reshape(x.shape)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = self._ac_deriv(flat)
        for xj, step in self._steps:
            out = out + step * self._rho(flat - xj)
        out = out + self.cantor_scale * self._cantor_sum(flat, self._rho)
        return out.reshape(x.shape)

    def breakpoints(self):
        pts = []
        if self._ac is not None:
            for p in self._ac.breaks[1:-1]:
                pts.extend(p - self.epsilon * self._ac_nodes)
        for w0, w1 in self.jump_windows:
            pts.extend((w0, w1))
        if self.carrier_window is not None:
            pts.extend(self.carrier_window)
        return tuple(sorted(pts))

    def sup_norm(self):
        xs = self._monitor_grid()
        return float(np.max(np.abs(self.value(xs))))

    def _monitor_grid(self, n=2001):
        a, b = self.domain
        parts = [np.linspace(a, b, n)]
        for w0, w1 in self.jump_windows:
            parts.append(np.linspace(w0 - self.epsilon, w1 + self.epsilon, 129))
        if self.carrier_window is not None:
            parts.append(np.linspace(*self.carrier_window, 2001))
        return np.unique(np.clip(np.concatenate(parts), a, b))

    def l1_gap(self):
        xs = self._monitor_grid()
        return float(np.trapezoid(
            np.abs(self.value(xs) - self.base.evaluate(xs)), xs))

    def total_variation(self):
        tv = sum(abs(s) for _, s in self._steps)
        tv += abs(self.cantor_scale) * self.leaf_mass * (
            0 if self.leaf_mids is None else self.leaf_mids.size)
        if self._ac is not None:
            a, b = self.domain
            tv += integrate_abs(self._ac_deriv, a, b, tol=1e-7,
                                breakpoints=self._ac.breaks[1:-1])
        return tv


@dataclass(frozen=True)
class SmoothClosedForm1D:
    """A closed-form smooth sequence element (value, derivative) pair."""

    domain: tuple
    f: object
    df: object
    feature_scale: float = 0.0
    label: str = ""

    def value(self, x):
        return np.asarray(self.f(np.asarray(x, float)), dtype=float)

    def derivative(self, x):
        return np.asarray(self.df(np.asarray(x, float)), dtype=float)

    def breakpoints(self):
        return ()

    def sup_norm(self):
        xs = np.linspace(*self.domain, 4001)
        return float(np.max(np.abs(self.value(xs))))

    def l1_gap(self, base=None):
        if base is None:
            return 0.0
        xs = np.linspace(*self.domain, 8001)
        return float(np.trapezoid(
            np.abs(self.value(xs) - base.evaluate(xs)), xs))


@dataclass(frozen=True)
class MollifiedRadial2D:
    """Smoothed radial step: value drops from ``inner`` to ``outer`` at r0."""

    center: tuple
    r0: float
    inner: float
    outer: float
    epsilon: float

    def profile(self, r):
        h = self.inner - self.outer
        return self.outer + h * (1.0 - _kernel_cdf(
            (np.asarray(r, float) - self.r0) / self.epsilon))

    def dprofile(self, r):
        h = self.inner - self.outer
        return -h * _kernel_rho(
            (np.asarray(r, float) - self.r0) / self.epsilon) / self.epsilon

    def value(self, pts):
        p = np.asarray(pts, dtype=float)
        r = np.linalg.norm(p - np.asarray(self.center), axis=-1)
        return self.profile(r)

    def sup_norm(self):
        return max(abs(self.inner), abs(self.outer))

    def l1_gap(self):
        # |u_eps - u| is supported on the ring of width 2 eps
        h = abs(self.inner - self.outer)
        r, w = gauss_nodes(self.r0 - self.epsilon, self.r0 + self.epsilon, 32)
        y = (r - self.r0) / self.epsilon
        gap = np.abs(_kernel_cdf(y) - (y > 0))
        return float(2.0 * math.pi * np.sum(w * r * h * gap))


# ---------------------------------------------------------------------------
# Direct quadrature of the functionals on sequence elements


def _apply_weight(vals, weight):
    if weight == "id":
        return vals
    if weight == "abs":
        return np.abs(vals)
    if weight == "pos":
        return np.maximum(vals, 0.0)
    raise ValueError(f"unknown weight {weight!r}")


def _element_integral_1d(field, elem, phi, window, weight, tol=1e-9):
    """int over the window of phi(x) w(b(x, u_eps) u_eps'(x)) dx."""
    lo, hi = window
    lo = max(lo, elem.domain[0])
    hi = min(hi, elem.domain[1])
    if phi is not None:
        lo = max(lo, phi.support[0])
        hi = min(hi, phi.support[1])
    if hi <= lo:
        return 0.0

    def integrand(x):
        q = field.eval(x, elem.value(x)) * elem.derivative(x)
        out = _apply_weight(q, weight)
        if phi is not None:
            out = out * phi.evaluate(x)
        return out

    total = 0.0
    regions = [(lo, hi)]
    cw = getattr(elem, "carrier_window", None)
    if cw is not None and cw[1] > lo and cw[0] < hi:
        if cw[0] < lo or cw[1] > hi:
            raise AssumptionViolation(
                "carrier-window", "the smoothed Cantor carrier must lie "
                "entirely inside the integration window")
        total += _carrier_term(field, elem, phi, weight)
        regions = [(lo, cw[0]), (cw[1], hi)]
    bps = [p for p in elem.breakpoints() if lo < p < hi]
    if phi is not None:
        bps.extend(p for p in phi.breakpoints if lo < p < hi)
    for a, b in regions:
        if b <= a:
            continue
        sub = tuple(p for p in bps if a < p < b)
        if weight == "abs":
            total += integrate_abs(integrand, a, b, tol=tol, breakpoints=sub)
        elif weight == "pos":
            raw = lambda x: (field.eval(x, elem.value(x))
                             * elem.derivative(x)
                             * (phi.evaluate(x) if phi is not None else 1.0))
            roots = find_sign_changes(raw, a, b, breakpoints=sub)
            total += adaptive_simpson(integrand, a, b, tol=tol,
                                      breakpoints=sub + tuple(roots))
        else:
            total += adaptive_simpson(integrand, a, b, tol=tol,
                                      breakpoints=sub)
    return total


def _carrier_term(field, elem, phi, weight, n=12):
    """Dual-form integral over the smoothed Cantor carrier.

    Requires a t-independent field there; the integrand is then linear in
    the derivative and the x-integral against each leaf kernel collapses to
    a short quadrature around the leaf midpoint.
    """
    if field.lipschitz_t != 0.0:
        raise AssumptionViolation(
            "t-independence", "Cantor recovery elements are integrated in "
            "dual form, which requires a field independent of t")
    cw = elem.carrier_window
    xs = np.linspace(cw[0], cw[1], 257)
    if np.max(np.abs(elem._ac_deriv(xs))) > 1e-10 * (1 + abs(elem.cantor_scale)):
        raise AssumptionViolation(
            "carrier-separation", "the absolutely continuous part must be "
            "flat across the Cantor carrier")
    for xj, _ in elem._steps:
        if cw[0] - elem.epsilon < xj < cw[1] + elem.epsilon:
            raise AssumptionViolation(
                "carrier-separation", "a smoothed jump overlaps the carrier")
    s = elem.cantor_scale
    y, w = gauss_nodes(-elem.epsilon, elem.epsilon, n)
    pts = elem.leaf_mids[:, None] + y[None, :]
    g = _apply_weight(s * np.asarray(field.eval(pts, np.zeros(pts.shape)),
                                     dtype=float), weight)
    if phi is not None:
        g = g * phi.evaluate(pts)
    return float(elem.leaf_mass * np.sum((w * elem._rho(y)) * g))


def _element_integral_radial(field, elem, phi, weight, tol=1e-10):
    c = np.asarray(elem.center, dtype=float)

    def f(pts):
        p = np.asarray(pts, dtype=float)
        d = p - c
        r = np.linalg.norm(d, axis=-1)
        er = d / r[..., None]
        b = np.asarray(field.eval(p, elem.profile(r)), dtype=float)
        q = np.sum(b * er, axis=-1) * elem.dprofile(r)
        out = _apply_weight(q, weight)
        if phi is not None:
            out = out * phi.evaluate(p)
        return out

    return polar_quad(f, tuple(c), elem.r0 - elem.epsilon,
                      elem.r0 + elem.epsilon, r_breaks=(elem.r0,), tol=tol)


# ---------------------------------------------------------------------------
# Functionals


_BV_TYPES = (BvFunction1D, SmoothRadialBv2D, PiecewiseConstantBv2D)


@dataclass(frozen=True)
class Functionals:
    """F, G, G+ and G_phi on an open window, all routed through the pairing.

    ``window`` is a 1D interval, a 2D box, or None for the full reference
    rectangle of a 2D function.
    """

    field: FieldB
    window: tuple = None
    tol: float = 1e-9

    def _restricted(self, u):
        rep = pairing_by_representation(self.field, u, tol=self.tol)
        mu = rep.measure
        if self.window is not None:
            mu = mu.restrict(self.window)
        return mu

    def _pair(self, u):
        """(G, F) for any supported argument."""
        if isinstance(u, _BV_TYPES):
            mu = self._restricted(u)
            return mu.total_mass(), mu.variation().total_mass()
        if isinstance(u, MollifiedRadial2D):
            return (_element_integral_radial(self.field, u, None, "id"),
                    _element_integral_radial(self.field, u, None, "abs"))
        win = self.window if self.window is not None else u.domain
        return (_element_integral_1d(self.field, u, None, win, "id"),
                _element_integral_1d(self.field, u, None, win, "abs"))

    def F(self, u):
        return self._pair(u)[1]

    def G(self, u):
        return self._pair(u)[0]

    def Gplus(self, u):
        g, f = self._pair(u)
        return 0.5 * (g + f)

    def G_phi(self, u, phi):
        if isinstance(u, _BV_TYPES):
            return self._restricted(u).integrate(phi)
        if isinstance(u, MollifiedRadial2D):
            return _element_integral_radial(self.field, u, phi, "id")
        win = self.window if self.window is not None else u.domain
        return _element_integral_1d(self.field, u, phi, win, "id")


def order_relation_check(field, u, window=None, slack=1e-9):
    """F >= G+ >= max(G, 0) and F >= |G|, with a small numerical slack."""
    fun = Functionals(field, window)
    g, f = fun._pair(u)
    gp = 0.5 * (g + f)
    eps = slack * (1.0 + abs(f))
    ok = (f >= gp - eps and gp >= max(g, 0.0) - eps and f >= abs(g) - eps)
    return {"F": f, "G": g, "Gplus": gp, "ok": bool(ok)}


# ---------------------------------------------------------------------------
# Approximating sequences


@dataclass
class ApproximatingSequence:
    """A finite prefix of an approximating sequence with a hypothesis mode.

    mode is one of "L1" (L^1 convergence with a uniform L^infty bound),
    "weak*" (uniform BV bound recorded), or "L1loc" (local L^1 with a
    locally bounded sigma).  The declared premise is monitored numerically
    by :meth:`monitor` and stored in ``premise``.
    """

    elements: tuple
    mode: str = "L1"
    labels: tuple = ()
    premise: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("L1", "weak*", "L1loc"):
            raise ValueError(f"unknown sequence mode {self.mode!r}")
        if not self.labels:
            self.labels = tuple(f"n={i}" for i in range(len(self.elements)))

    @staticmethod
    def mollified(u, eps_schedule, mode="L1", n_ac=24):
        elems = tuple(MollifiedBv1D(u, e, n_ac=n_ac) for e in eps_schedule)
        labels = tuple(f"eps={e:.6g}" for e in eps_schedule)
        return ApproximatingSequence(elems, mode=mode, labels=labels)

    @staticmethod
    def oscillation(u, n_values, amplitude=1.0, mode="L1"):
        """u + (amplitude/n) sin(n x) for a smooth base u."""
        if u.jumps or u.cantor is not None:
            raise AssumptionViolation(
                "smooth-base", "oscillation sequences need a W^{1,1} base")
        elems = []
        for n in n_values:
            f = (lambda x, n=n: u.evaluate(x)
                 + (amplitude / n) * np.sin(n * x))
            df = (lambda x, n=n: u.ac_derivative(x)
                  + amplitude * np.cos(n * x))
            elems.append(SmoothClosedForm1D(u.domain, f, df,
                                            feature_scale=2 * math.pi / n,
                                            label=f"n={n}"))
        return ApproximatingSequence(tuple(elems), mode=mode,
                                     labels=tuple(e.label for e in elems))

    @staticmethod
    def constant(u, count=6, mode="L1"):
        return ApproximatingSequence(tuple(u for _ in range(count)),
                                     mode=mode,
                                     labels=tuple("u" for _ in range(count)))

    def monitor(self, u):
        """Record the declared premise: sup norms, L1 gaps, TV bounds."""
        sups, gaps, tvs = [], [], []
        for e in self.elements:
            if isinstance(e, _BV_TYPES):
                sups.append(e.sup_norm())
                gaps.append(0.0)
                tvs.append(e.total_variation()
                           if isinstance(e, BvFunction1D) else float("nan"))
            elif isinstance(e, MollifiedRadial2D):
                sups.append(e.sup_norm())
                gaps.append(e.l1_gap())
                tvs.append(2 * math.pi * e.r0 * abs(e.inner - e.outer))
            elif isinstance(e, SmoothClosedForm1D):
                sups.append(e.sup_norm())
                gaps.append(e.l1_gap(u))
                tvs.append(float("nan"))
            else:
                sups.append(e.sup_norm())
                gaps.append(e.l1_gap())
                tvs.append(e.total_variation())
        self.premise = {
            "mode": self.mode,
            "sup_linf": max(sups),
            "l1_gaps": tuple(gaps),
            "tv_bound": max((t for t in tvs if not math.isnan(t)),
                            default=float("nan")),
        }
        if not math.isfinite(self.premise["sup_linf"]):
            raise AssumptionViolation(
                "uniform-bound", "sequence is not uniformly bounded")
        return self.premise


def liminf_tail(values, tail=5):
    vals = list(values)
    return min(vals[-min(tail, len(vals)):])


# ---------------------------------------------------------------------------
# Operations


def f_phi_smooth(b, u, phi, A):
    """int_A phi b(x,u) . grad u for Sobolev u; +inf marker otherwise."""
    if isinstance(u, BvFunction1D):
        if u.jumps or u.cantor is not None:
            return float("inf")

        def integrand(x):
            return (phi.evaluate(x) * b.eval(x, u.evaluate(x))
                    * u.ac_derivative(x))

        lo = max(A[0], u.domain[0], phi.support[0])
        hi = min(A[1], u.domain[1], phi.support[1])
        if hi <= lo:
            return 0.0
        bps = tuple(p for p in u.breakpoints() + phi.breakpoints
                    if lo < p < hi)
        return adaptive_simpson(integrand, lo, hi, tol=1e-10, breakpoints=bps)
    if isinstance(u, PiecewiseConstantBv2D):
        return float("inf")
    if isinstance(u, SmoothRadialBv2D):
        return Functionals(b, A).G_phi(u, phi)
    if isinstance(u, MollifiedRadial2D):
        return _element_integral_radial(b, u, phi, "id")
    win = A if A is not None else u.domain
    return _element_integral_1d(b, u, phi, win, "id")


@dataclass(frozen=True)
class ContinuityResult:
    target: float
    values: tuple
    gaps: tuple
    mode: str
    premise: dict

    @property
    def table(self):
        return tuple(zip(self.values, self.gaps))


def continuity_check_Gphi(b, phi, sequence, u, tol=1e-5, window=None):
    """G_phi(u_n) -> G_phi(u) along the declared sequence."""
    win = window
    if win is None:
        win = u.domain if isinstance(u, BvFunction1D) else None
    fun = Functionals(b, win)
    sequence.monitor(u)
    target = fun.G_phi(u, phi)
    values = tuple(fun.G_phi(e, phi) for e in sequence.elements)
    gaps = tuple(abs(v - target) for v in values)
    if gaps[-1] > tol:
        raise NoApparentConvergence(
            f"G_phi gap {gaps[-1]:.3e} above {tol:.1e} at the end of the "
            f"sequence (mode {sequence.mode})")
    return ContinuityResult(target, values, gaps, sequence.mode,
                            dict(sequence.premise))


@dataclass(frozen=True)
class LscResult:
    liminf: float
    target: float
    margin: float
    values: tuple
    truncation_k: float
    truncation_residual: float


def lsc_check(b, functional, sequence, u, tol=1e-6, window=None):
    """Lower semicontinuity of F or G+ along an L1-converging sequence."""
    if functional not in ("F", "G+"):
        raise ValueError("functional must be 'F' or 'G+'")
    win = window
    if win is None:
        win = u.domain if isinstance(u, BvFunction1D) else None
    fun = Functionals(b, win)
    sequence.monitor(u)
    ev = (fun.F if functional == "F" else fun.Gplus)
    target = ev(u)
    values = tuple(ev(e) for e in sequence.elements)
    lim = liminf_tail(values)
    margin = lim - target
    # the proof truncates the field at a level k above every function in
    # sight; verify that doing so does not change the target value
    k = math.floor(max(sequence.premise["sup_linf"], u.sup_norm())) + 2.0
    fun_k = Functionals(truncate(b, k), win)
    target_k = (fun_k.F if functional == "F" else fun_k.Gplus)(u)
    k_res = abs(target_k - target)
    if margin < -tol:
        raise InequalityViolated(
            f"{functional} liminf {lim:.8f} fell below the target "
            f"{target:.8f} by {-margin:.3e}")
    return LscResult(lim, target, margin, values, k, k_res)


@dataclass(frozen=True)
class RelaxationResult:
    target: float
    eps: tuple
    values: tuple
    liminf: float
    gap: float
    mode: str
    jump_report: tuple
    cantor_report: tuple


def relaxation_check(b, u, phi, A, eps_sequence, tol=1e-4, mode="weak*",
                     with_blowups=True):
    """F^phi along a mollified recovery sequence against int_A phi d mu."""
    eps_sequence = tuple(float(e) for e in eps_sequence)
    if len(eps_sequence) < 12:
        raise ValueError("the relaxation schedule needs at least 12 radii")
    if isinstance(u, PiecewiseConstantBv2D):
        region, inner = u.regions[0]
        elements = tuple(
            MollifiedRadial2D(region.center, region.radius, inner + u.background,
                              u.background, e) for e in eps_sequence)
        seq = ApproximatingSequence(elements, mode=mode,
                                    labels=tuple(f"eps={e:.6g}"
                                                 for e in eps_sequence))
        fun = Functionals(b, None)
    else:
        seq = ApproximatingSequence.mollified(u, eps_sequence, mode=mode)
        fun = Functionals(b, A)
    seq.monitor(u)
    target = fun.G_phi(u, phi)
    values = tuple(fun.G_phi(e, phi) for e in seq.elements)
    lim = liminf_tail(values)
    gap = abs(lim - target)
    jump_report, cantor_report = (), ()
    if with_blowups and isinstance(u, BvFunction1D):
        radii = tuple(0.02 * 0.5 ** i for i in range(6))
        if u.jumps:
            jump_report = (blowup_density(b, u, u.jumps[0].location, radii),)
        if u.cantor is not None:
            lad = u.cantor.ladder
            x0 = lad.interval[0]  # a carrier point of the singular part
            rl = tuple((lad.interval[1] - lad.interval[0]) * lad.side ** i
                       for i in range(2, 8))
            cantor_report = (blowup_density(b, u, x0, rl),)
    if gap > tol:
        raise GapAboveTolerance(
            f"relaxation gap {gap:.3e} above {tol:.1e} "
            f"(liminf {lim:.8f}, target {target:.8f})")
    return RelaxationResult(target, eps_sequence, values, lim, gap, mode,
                            jump_report, cantor_report)


@dataclass(frozen=True)
class BlowupResult:
    x0: object
    radii: tuple
    quotients: tuple
    extrapolated: float
    theta_reference: float
    mismatch: float
    converged: bool


def blowup_density(b, u, x0, radius_sequence):
    """mu(B_r)/|Du|(B_r) around x0, extrapolated and compared with Theta."""
    rep = pairing_by_representation(b, u)
    du = gradient_measure(u)
    quotients = []
    for r in radius_sequence:
        if np.ndim(x0) == 0:
            win = (float(x0) - r, float(x0) + r)
            num = rep.measure.restrict(win, closed_right=True).total_mass()
            den = du.restrict(win, closed_right=True).variation().total_mass()
        else:
            win = ((x0[0] - r, x0[0] + r), (x0[1] - r, x0[1] + r))
            num = rep.measure.restrict(win).total_mass()
            den = du.restrict(win).variation().total_mass()
        quotients.append(num / den if den > 0 else float("nan"))
    arr = [q for q in quotients if math.isfinite(q)]
    extrap = aitken(arr) if len(arr) >= 3 else (arr[-1] if arr else float("nan"))
    if np.ndim(x0) == 0:
        theta_ref = float(rep.theta(float(x0)))
    else:
        theta_ref = float(rep.theta(np.asarray(x0, dtype=float)))
    mismatch = abs(extrap - theta_ref)
    converged = (len(arr) == len(quotients) and len(arr) >= 3
                 and abs(arr[-1] - extrap) < 1e-2 * (1 + abs(extrap)))
    return BlowupResult(x0, tuple(radius_sequence), tuple(quotients),
                        float(extrap), theta_ref, mismatch, converged)


# ---------------------------------------------------------------------------
# Truncation identities


def truncate_bv(u: BvFunction1D, k):
    """T_k u = clamp(u, -k, k) for piecewise constant functions with jumps."""
    k = float(k)
    if u.cantor is not None:
        raise AssumptionViolation(
            "truncation-scope", "T_k is implemented for jump functions only")
    xs = np.linspace(*u.domain, 801)
    if np.max(np.abs(u.ac_derivative(xs))) > 1e-12:
        lo, hi = u.value_range()
        if hi > k or lo < -k:
            raise AssumptionViolation(
                "truncation-scope", "T_k of a non-constant absolutely "
                "continuous part is not supported")
        return u
    a, _ = u.domain
    level = float(u.evaluate(np.asarray([a + 1e-9]))[0])
    levels = [level]
    for j in u.jumps:
        level = level + (j.right_value - j.left_value)
        levels.append(level)
    clipped = [min(max(v, -k), k) for v in levels]
    jumps = []
    for j, (lv, rv) in zip(u.jumps, zip(clipped, clipped[1:])):
        if rv != lv:
            jumps.append(JumpPoint.from_sides(j.location, lv, rv))
    return BvFunction1D(u.domain, ac=Piecewise1D.constant(u.domain, clipped[0]),
                        jumps=tuple(jumps))


def sigma_k_identity_check(b, u, k, phi=None, n_diffuse=20):
    """Representation and functional identities for the truncated field.

    Checks Theta(b^k) = sigma_k(u) Theta(b) on the diffuse part, the
    sigma_k-weighted average on jump atoms, and G^k_phi(u) = G^k_phi(T_k u).
    Returns the maximal residual of each identity.
    """
    k = float(k)
    bk = truncate(b, k)
    rep = pairing_by_representation(b, u, genuine_jumps=False)
    repk = pairing_by_representation(bk, u, genuine_jumps=False)

    a0, a1 = u.domain
    xs = np.linspace(a0 + 1e-3, a1 - 1e-3, 10 * n_diffuse)
    xs = xs[np.abs(u.ac_derivative(xs)) > 1e-8][:n_diffuse]
    if xs.size:
        uv = u.evaluate(xs)
        diffuse = max(
            abs(float(repk.theta(float(x)))
                - float(sigma_k(t, k)) * float(rep.theta(float(x))))
            for x, t in zip(xs, uv))
    else:
        diffuse = 0.0

    jump_res = 0.0
    atoms_k = dict(repk.measure.atoms)
    for j in u.jumps:
        kinks = sorted({j.u_minus, j.u_plus, -k, k, -(k - 1), k - 1})
        kinks = [t for t in kinks if j.u_minus <= t <= j.u_plus]
        want = 0.0
        for t0, t1 in zip(kinks, kinks[1:]):
            t, w = gauss_nodes(t0, t1, 16)
            q = np.asarray(b.eval(np.full_like(t, j.location), t),
                           dtype=float) * j.nu
            want += float(np.sum(w * sigma_k(t, k) * q))
        jump_res = max(jump_res, abs(atoms_k[j.location] - want))

    g_res = float("nan")
    if phi is not None:
        fun = Functionals(bk, u.domain)
        g_res = abs(fun.G_phi(u, phi) - fun.G_phi(truncate_bv(u, k), phi))
    return {"k": k, "diffuse": diffuse, "jump": jump_res,
            "g_invariance": g_res}
