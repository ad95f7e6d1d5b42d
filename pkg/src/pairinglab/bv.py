"""BV functions built from explicit decompositions.

1D functions are sums of a piecewise-C^1 part, finitely many jumps and an
optional singular-continuous (ladder) part.  2D functions are either smooth
radial profiles or piecewise constants on discs/polygons, so every derived
quantity stays exactly representable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateLevel
from .measures import (Circle, RadonMeasure1D, RadonMeasure2D, Segment,
                       DiscPatch, SingularLadder)
from .quadrature import adaptive_simpson, gauss_nodes, _leggauss

__all__ = [
    "Piecewise1D",
    "JumpPoint",
    "CantorPart",
    "BvFunction1D",
    "SmoothRadialBv2D",
    "PiecewiseConstantBv2D",
    "Disc",
    "PolygonRegion",
    "FinitePerimeterSet1D",
    "FinitePerimeterSet2D",
    "indicator_1d",
    "gradient_measure",
    "level_set",
    "precise_values",
    "coarea_tv_check",
]


# ---------------------------------------------------------------------------
# Piecewise-C^1 absolutely continuous parts


@dataclass(frozen=True)
class Piecewise1D:
    """Piecewise-C^1 function given by breakpoints and (value, derivative)
    evaluators per piece."""

    breaks: tuple               # sorted, including both endpoints
    pieces: tuple               # ((f, df), ...) vectorized callables

    def __post_init__(self):
        if len(self.pieces) != len(self.breaks) - 1:
            raise ValueError("need one piece per breakpoint gap")

    def _bins(self, x):
        idx = np.searchsorted(self.breaks, np.asarray(x, dtype=float),
                              side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        idx = self._bins(x)
        out = np.empty(x.shape)
        for i, (f, _) in enumerate(self.pieces):
            m = idx == i
            if m.any():
                out[m] = np.asarray(f(x[m]), dtype=float)
        return out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        idx = self._bins(x)
        out = np.empty(x.shape)
        for i, (_, df) in enumerate(self.pieces):
            m = idx == i
            if m.any():
                out[m] = np.asarray(df(x[m]), dtype=float)
        return out

    @staticmethod
    def constant(domain, c):
        return Piecewise1D((domain[0], domain[1]),
                           (((lambda x, _c=c: np.full(np.shape(x), float(_c))),
                             (lambda x: np.zeros(np.shape(x)))),))

    @staticmethod
    def from_callables(domain, f, df, interior_breaks=()):
        brk = (domain[0],) + tuple(interior_breaks) + (domain[1],)
        return Piecewise1D(brk, tuple((f, df) for _ in range(len(brk) - 1)))


@dataclass(frozen=True)
class JumpPoint:
    location: float
    u_minus: float
    u_plus: float
    nu: int  # +1 / -1, pointing from the u_minus side to the u_plus side

    def __post_init__(self):
        if not self.u_plus > self.u_minus:
            raise ValueError("jump must satisfy u_plus > u_minus")
        if self.nu not in (-1, 1):
            raise ValueError("nu must be +-1")

    @property
    def height(self):
        return self.u_plus - self.u_minus

    @property
    def left_value(self):
        return self.u_minus if self.nu == 1 else self.u_plus

    @property
    def right_value(self):
        return self.u_plus if self.nu == 1 else self.u_minus

    @staticmethod
    def from_sides(x0, left, right):
        """Normalize so that the stored pair satisfies u_plus > u_minus."""
        if right > left:
            return JumpPoint(x0, left, right, 1)
        if left > right:
            return JumpPoint(x0, right, left, -1)
        raise ValueError("degenerate jump with equal one-sided values")


@dataclass(frozen=True)
class CantorPart:
    scale: float
    ladder: SingularLadder

    def evaluate(self, x):
        return self.scale * self.ladder.evaluate(x)


# ---------------------------------------------------------------------------
# 1D BV functions


@dataclass(frozen=True)
class BvFunction1D:
    domain: tuple
    ac: Piecewise1D = None
    jumps: tuple = ()
    cantor: CantorPart = None

    def __post_init__(self):
        a, b = self.domain
        xs = [j.location for j in self.jumps]
        if any(x2 <= x1 for x1, x2 in zip(xs, xs[1:])):
            raise ValueError("jump locations must be strictly increasing")
        if any(not (a < x < b) for x in xs):
            raise ValueError("jump locations must be interior to the domain")
        if self.ac is not None:
            # the absolutely continuous part must really be continuous;
            # discontinuities belong in explicit JumpPoint entries
            for p in self.ac.breaks[1:-1]:
                h = 1e-9 * (b - a)
                left, right = self.ac.evaluate(np.array([p - h, p + h]))
                if abs(right - left) > 1e-6:
                    raise ValueError(
                        f"ac part is discontinuous at {p}; use a JumpPoint")

    # -- evaluation

    def _base(self, x):
        """Everything except the jump steps."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        if self.ac is not None:
            out = out + self.ac.evaluate(x)
        if self.cantor is not None:
            out = out + self.cantor.evaluate(x)
        return out

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = self._base(x)
        for j in self.jumps:
            out = out + (j.right_value - j.left_value) * (x > j.location)
        return out

    def ac_derivative(self, x):
        if self.ac is None:
            return np.zeros(np.shape(x))
        return self.ac.derivative(x)

    def breakpoints(self):
        pts = [j.location for j in self.jumps]
        if self.ac is not None:
            pts.extend(self.ac.breaks[1:-1])
        if self.cantor is not None:
            pts.extend(self.cantor.ladder.interval)
        return tuple(sorted(set(pts)))

    def sup_norm(self, window=None):
        a, b = window if window is not None else self.domain
        xs = np.linspace(a, b, 4001)
        xs = np.unique(np.concatenate(
            [xs, [p for p in self.breakpoints() if a <= p <= b]]))
        vals = [float(np.abs(self.evaluate(xs)).max())]
        for j in self.jumps:
            if a <= j.location <= b:
                vals.append(max(abs(j.u_minus), abs(j.u_plus)))
        return max(vals)

    def value_range(self):
        xs = np.linspace(self.domain[0], self.domain[1], 4001)
        xs = np.unique(np.concatenate([xs, self.breakpoints()]))
        v = self.evaluate(xs)
        vals = [float(v.min()), float(v.max())]
        for j in self.jumps:
            vals.extend([j.u_minus, j.u_plus])
        return min(vals), max(vals)

    # -- precise representatives

    def jump_at(self, x, atol=1e-12):
        for j in self.jumps:
            if abs(j.location - x) <= atol:
                return j
        return None

    def precise_values(self, x):
        """(u_tilde, u_star) at diffuse points, ((u-, u+, nu), u_star) at jumps."""
        j = self.jump_at(x)
        if j is not None:
            return (j.u_minus, j.u_plus, j.nu), 0.5 * (j.u_minus + j.u_plus)
        v = float(self.evaluate(np.array([x]))[0])
        return v, v

    # -- gradient measure

    def gradient_measure(self):
        ac_density = None
        bps = ()
        if self.ac is not None:
            ac_density = self.ac.derivative
            bps = tuple(self.ac.breaks[1:-1])
        atoms = tuple((j.location, j.height * j.nu) for j in self.jumps)
        ladder = None
        scale = 0.0
        if self.cantor is not None:
            ladder = self.cantor.ladder
            scale = self.cantor.scale
        return RadonMeasure1D(self.domain, ac_density=ac_density,
                              ac_breakpoints=bps, atoms=atoms,
                              ladder=ladder, ladder_scale=scale)

    def total_variation(self):
        return self.gradient_measure().variation().total_mass()

    # -- level sets

    def level_breaks(self):
        """Values of t at which the structure of {u > t} can change."""
        vals = set()
        for j in self.jumps:
            vals.add(j.u_minus)
            vals.add(j.u_plus)
        # endpoint / critical values of the continuous part, per segment
        for lo, hi in self._segments():
            xs = np.linspace(lo, hi, 801)
            v = self._segment_values(xs, lo, hi)
            vals.add(float(v[0]))
            vals.add(float(v[-1]))
            dv = np.diff(v)
            turning = np.nonzero(dv[:-1] * dv[1:] < 0)[0]
            for i in turning:
                vals.add(float(v[i + 1]))
        lo, hi = self.value_range()
        vals.add(lo)
        vals.add(hi)
        return tuple(sorted(vals))

    def _segments(self):
        pts = [self.domain[0]] + list(self.breakpoints()) + [self.domain[1]]
        pts = sorted(set(pts))
        return list(zip(pts[:-1], pts[1:]))

    def _segment_values(self, xs, lo, hi):
        """u on a jump-free segment, using one-sided limits at the ends."""
        v = self._base(xs)
        for j in self.jumps:
            if j.location <= lo:
                v = v + (j.right_value - j.left_value)
        return v

    def _cantor_covers(self, lo, hi):
        if self.cantor is None:
            return False
        ca, cb = self.cantor.ladder.interval
        return lo >= ca - 1e-12 and hi <= cb + 1e-12

    def level_crossings(self, t):
        """Sorted list of (x, nu) interior crossings of level t."""
        crossings = []
        for j in self.jumps:
            if j.u_minus < t < j.u_plus:
                crossings.append((j.location, j.nu))
        for lo, hi in self._segments():
            npts = 1201
            xs = np.linspace(lo, hi, npts)
            v = self._segment_values(xs, lo, hi) - t
            flat = np.abs(v) < 1e-13
            if flat.sum() > npts // 10:
                raise DegenerateLevel(
                    f"level {t} coincides with a plateau of u on [{lo}, {hi}]")
            s = np.sign(v)
            s[s == 0.0] = 1.0
            idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
            offset = sum((j.right_value - j.left_value)
                         for j in self.jumps if j.location <= lo)

            def g(x, _off=offset):
                return float(self._base(np.array([x]))[0]) + _off - t

            for i in idx:
                x0 = brentq(g, xs[i], xs[i + 1], xtol=1e-13)
                nu = 1 if v[i] < 0 else -1  # u increasing through t => set to the right
                crossings.append((float(x0), nu))
        return sorted(crossings)

    def level_set(self, t):
        crossings = self.level_crossings(t)
        a, b = self.domain
        pts = [a] + [x for x, _ in crossings] + [b]
        intervals = []
        eps = 1e-9 * (b - a)
        for lo, hi in zip(pts[:-1], pts[1:]):
            if hi - lo < eps:
                continue
            mid = 0.5 * (lo + hi)
            if float(self.evaluate(np.array([mid]))[0]) > t:
                intervals.append((lo, hi))
        # merge adjacent intervals sharing an endpoint (degenerate split)
        merged = []
        for iv in intervals:
            if merged and abs(merged[-1][1] - iv[0]) < eps:
                merged[-1] = (merged[-1][0], iv[1])
            else:
                merged.append(list(iv) if isinstance(iv, tuple) else iv)
        merged = [tuple(iv) for iv in merged]
        return FinitePerimeterSet1D(tuple(merged), tuple(crossings), self.domain)

    # -- composed integration handling the ladder part

    def integrate_composed(self, h, lo=None, hi=None, tol=1e-9,
                           extra_breaks=()):
        """Integral of h(x, u(x)) dx, exact over ladder plateaus.

        ``h`` must broadcast over numpy arrays in both arguments.
        """
        a, b = self.domain
        lo = a if lo is None else max(lo, a)
        hi = b if hi is None else min(hi, b)
        if hi <= lo:
            return 0.0
        pts = sorted(set([lo, hi] + [p for p in self.breakpoints()
                                     if lo < p < hi]
                         + [p for p in extra_breaks if lo < p < hi]))
        total = 0.0
        for s0, s1 in zip(pts[:-1], pts[1:]):
            if self._cantor_covers(s0, s1):
                total += self._cantor_segment_integral(h, s0, s1)
            else:
                fn = lambda x: np.asarray(
                    h(x, self.evaluate(x)), dtype=float)
                total += adaptive_simpson(fn, s0, s1, tol=tol)
        return total

    def _cantor_segment_integral(self, h, s0, s1, n_plateau=6):
        cp = self.cantor
        lad = cp.ladder
        offset = sum((j.right_value - j.left_value)
                     for j in self.jumps if j.location <= s0)

        def base(x):
            out = np.full(np.shape(x), offset)
            if self.ac is not None:
                out = out + self.ac.evaluate(x)
            return out

        gx, gw = _leggauss(n_plateau)
        total = 0.0
        # plateau intervals: u is smooth there (base + constant ladder value)
        plo, phi, pval = lad.plateaus()
        clo = np.clip(plo, s0, s1)
        chi = np.clip(phi, s0, s1)
        keep = chi > clo
        if keep.any():
            clo, chi, val = clo[keep], chi[keep], pval[keep]
            mid = 0.5 * (clo + chi)[:, None]
            half = 0.5 * (chi - clo)[:, None]
            xs = mid + half * gx[None, :]
            uvals = base(xs) + cp.scale * val[:, None]
            hv = np.asarray(h(xs, uvals), dtype=float)
            total += float(np.sum(hv * (half * gw[None, :])))
        # leaf intervals: midpoint rule, error O(side^depth)
        llo, lhi, lval, _mass = lad.increments()
        clo = np.clip(llo, s0, s1)
        chi = np.clip(lhi, s0, s1)
        keep = chi > clo
        if keep.any():
            clo, chi, val = clo[keep], chi[keep], lval[keep]
            xm = 0.5 * (clo + chi)
            hv = np.asarray(h(xm, base(xm) + cp.scale * val), dtype=float)
            total += float(np.dot(hv, chi - clo))
        return total


def indicator_1d(intervals, domain, value=1.0):
    """BV indicator value*chi of a finite union of intervals."""
    jumps = []
    a, b = domain
    for lo, hi in intervals:
        if lo > a:
            jumps.append(JumpPoint.from_sides(lo, 0.0, value))
        if hi < b:
            jumps.append(JumpPoint.from_sides(hi, value, 0.0))
    jumps.sort(key=lambda j: j.location)
    return BvFunction1D(domain, ac=None, jumps=tuple(jumps))


# ---------------------------------------------------------------------------
# Finite perimeter sets


@dataclass(frozen=True)
class FinitePerimeterSet1D:
    intervals: tuple
    boundary: tuple  # ((x, interior normal nu), ...)
    domain: tuple

    def perimeter(self):
        return float(len(self.boundary))

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.intervals:
            out |= (x > lo) & (x < hi)
        return out

    def indicator_bv(self, value=1.0):
        return indicator_1d(self.intervals, self.domain, value=value)


@dataclass(frozen=True)
class Disc:
    center: tuple
    radius: float

    def boundary_curve(self):
        return Circle(self.center, self.radius)

    def perimeter(self):
        return 2.0 * np.pi * self.radius

    def interior_normal(self, pts):
        p = np.asarray(pts, dtype=float)
        d = p - np.asarray(self.center, dtype=float)
        r = np.hypot(d[..., 0], d[..., 1])
        safe = np.where(r > 0, r, 1.0)
        return -d / safe[..., None]

    def contains(self, pts):
        p = np.asarray(pts, dtype=float)
        d = p - np.asarray(self.center, dtype=float)
        return np.hypot(d[..., 0], d[..., 1]) < self.radius


@dataclass(frozen=True)
class PolygonRegion:
    vertices: tuple  # counter-clockwise

    def edges(self):
        v = np.asarray(self.vertices, dtype=float)
        return [(tuple(v[i]), tuple(v[(i + 1) % len(v)]))
                for i in range(len(v))]

    def perimeter(self):
        return sum(Segment(p0, p1).length for p0, p1 in self.edges())

    def edge_interior_normal(self, p0, p1):
        # ccw orientation: interior lies to the left of each edge
        d = np.asarray(p1, dtype=float) - np.asarray(p0, dtype=float)
        n = np.array([-d[1], d[0]])
        return n / np.linalg.norm(n)

    def contains(self, pts):
        from .measures import _points_in_polygon
        return _points_in_polygon(np.asarray(pts, dtype=float),
                                  np.asarray(self.vertices, dtype=float))


@dataclass(frozen=True)
class FinitePerimeterSet2D:
    region: object  # Disc | PolygonRegion

    def perimeter(self):
        return self.region.perimeter()

    def interior_normal_at(self, pts):
        if isinstance(self.region, Disc):
            return self.region.interior_normal(pts)
        raise NotImplementedError("per-edge normals are used for polygons")


# ---------------------------------------------------------------------------
# 2D BV functions


@dataclass(frozen=True)
class SmoothRadialBv2D:
    """u(x) = profile(|x - center|), zero outside the support radius.

    The profile must be C^1, strictly decreasing on (0, support_radius) and
    vanish at the support radius, so every level set is a disc.
    """

    rect: tuple
    center: tuple
    profile: object
    dprofile: object
    support_radius: float

    def evaluate(self, pts):
        p = np.asarray(pts, dtype=float)
        r = np.hypot(p[..., 0] - self.center[0], p[..., 1] - self.center[1])
        return np.where(r < self.support_radius,
                        np.asarray(self.profile(r), dtype=float), 0.0)

    def gradient(self, pts):
        p = np.asarray(pts, dtype=float)
        dx = p[..., 0] - self.center[0]
        dy = p[..., 1] - self.center[1]
        r = np.hypot(dx, dy)
        safe = np.where(r > 0, r, 1.0)
        fac = np.where(r < self.support_radius,
                       np.asarray(self.dprofile(r), dtype=float), 0.0) / safe
        return np.stack([fac * dx, fac * dy], axis=-1)

    def max_value(self):
        return float(self.profile(0.0))

    def radius_of_level(self, t):
        if not (0.0 < t < self.max_value()):
            raise DegenerateLevel(f"level {t} outside the profile range")
        return brentq(lambda r: float(self.profile(r)) - t,
                      0.0, self.support_radius, xtol=1e-14)

    def level_set(self, t):
        return FinitePerimeterSet2D(Disc(self.center, self.radius_of_level(t)))

    def sup_norm(self, window=None):
        return abs(self.max_value())

    def value_range(self):
        return 0.0, self.max_value()


@dataclass(frozen=True)
class PiecewiseConstantBv2D:
    """Finitely many disjoint constant regions over a zero background."""

    rect: tuple
    regions: tuple  # ((Disc | PolygonRegion, value), ...)
    background: float = 0.0

    def __post_init__(self):
        if self.background != 0.0:
            raise ValueError("only zero background is supported")

    def evaluate(self, pts):
        p = np.asarray(pts, dtype=float)
        out = np.full(p.shape[:-1], self.background)
        for region, val in self.regions:
            out = np.where(region.contains(p), val, out)
        return out

    def gradient(self, pts):
        p = np.asarray(pts, dtype=float)
        return np.zeros(p.shape[:-1] + (2,))

    def sup_norm(self, window=None):
        return max([abs(self.background)] +
                   [abs(v) for _, v in self.regions])

    def value_range(self):
        vals = [self.background] + [v for _, v in self.regions]
        return min(vals), max(vals)

    def level_set(self, t):
        active = [(r, v) for r, v in self.regions if v > t]
        for _, v in self.regions:
            if v == t:
                raise DegenerateLevel(f"level {t} equals a region value")
        if t == self.background:
            raise DegenerateLevel("level equals the background value")
        if len(active) != 1:
            raise NotImplementedError(
                "catalog scope: exactly one active region per level")
        return FinitePerimeterSet2D(active[0][0])


# ---------------------------------------------------------------------------
# Module-level operations


def gradient_measure(u):
    if isinstance(u, BvFunction1D):
        return u.gradient_measure()
    if isinstance(u, SmoothRadialBv2D):
        grad = u.gradient

        def density(pts):
            g = np.asarray(grad(pts), dtype=float)
            return np.hypot(g[..., 0], g[..., 1])

        patch = DiscPatch(u.center, u.support_radius)
        return RadonMeasure2D(u.rect, ac_parts=((patch, density),))
    if isinstance(u, PiecewiseConstantBv2D):
        parts = []
        for region, val in u.regions:
            height = abs(val - u.background)
            dens = (lambda p, _h=height: np.full(np.shape(p)[:-1], _h))
            if isinstance(region, Disc):
                parts.append((region.boundary_curve(), dens))
            else:
                for p0, p1 in region.edges():
                    parts.append((Segment(p0, p1), dens))
        return RadonMeasure2D(u.rect, surface_parts=tuple(parts))
    raise TypeError(f"unsupported BV function {type(u)!r}")


def level_set(u, t):
    return u.level_set(t)


def precise_values(u, x):
    return u.precise_values(x)


def coarea_tv_check(u, g, tol=1e-8):
    """Check int g d|Du| = int dt int_{boundary of {u>t}} g dH^{N-1}."""
    if isinstance(u, BvFunction1D):
        lhs = u.gradient_measure().variation().integrate(g, tol=tol)
        rhs = _coarea_rhs_1d(u, g, tol=tol)
    elif isinstance(u, SmoothRadialBv2D):
        du = gradient_measure(u).variation()
        lhs = du.integrate(g, tol=tol)
        # parameterize the level by the disc radius
        def integrand(r):
            r = np.atleast_1d(np.asarray(r, dtype=float))
            out = np.empty(r.shape)
            for i, ri in enumerate(r):
                circ = Circle(u.center, float(ri))
                out[i] = circ.integrate(g) * abs(float(u.dprofile(ri)))
            return out
        rhs = adaptive_simpson(integrand, 1e-9, u.support_radius, tol=tol)
    elif isinstance(u, PiecewiseConstantBv2D):
        du = gradient_measure(u).variation()
        lhs = du.integrate(g, tol=tol)
        rhs = 0.0
        for region, val in u.regions:
            height = abs(val - u.background)
            if isinstance(region, Disc):
                rhs += height * region.boundary_curve().integrate(g)
            else:
                for p0, p1 in region.edges():
                    rhs += height * Segment(p0, p1).integrate(g)
    else:
        raise TypeError(f"unsupported BV function {type(u)!r}")
    return lhs, rhs, abs(lhs - rhs)


def _coarea_rhs_1d(u, g, tol=1e-8, dyadic_depth=13):
    breaks = u.level_breaks()
    tmin, tmax = u.value_range()
    total = 0.0
    for t0, t1 in zip(breaks[:-1], breaks[1:]):
        if t1 - t0 < 1e-13:
            continue
        tm = 0.5 * (t0 + t1)
        cantor_range = _cantor_level_range(u)
        if cantor_range is not None and cantor_range[0] <= tm <= cantor_range[1]:
            total += _dyadic_level_integral(u, g, t0, t1, dyadic_depth)
            continue
        try:
            u.level_crossings(tm)
        except DegenerateLevel:
            continue

        def integrand(ts):
            ts = np.atleast_1d(np.asarray(ts, dtype=float))
            out = np.empty(ts.shape)
            for i, t in enumerate(ts):
                xs = np.array([x for x, _ in u.level_crossings(float(t))])
                out[i] = float(np.sum(np.asarray(g(xs), dtype=float))) \
                    if xs.size else 0.0
            return out

        pad = 1e-10 * (tmax - tmin)
        total += adaptive_simpson(integrand, t0 + pad, t1 - pad, tol=tol)
    return total


def _cantor_level_range(u):
    if not isinstance(u, BvFunction1D) or u.cantor is None:
        return None
    ca, cb = u.cantor.ladder.interval
    va = float(u.evaluate(np.array([ca + 1e-13]))[0])
    vb = float(u.evaluate(np.array([cb - 1e-13]))[0])
    return (min(va, vb), max(va, vb))


def _dyadic_level_integral(u, g, t0, t1, depth):
    """t-integral over a ladder-generated level range.

    The crossing map t -> x(t) jumps at every dyadic level value, so the
    panels are aligned with the dyadic grid of the ladder range and the
    crossing is evaluated through the vectorized ladder inverse.
    """
    cp = u.cantor
    lad = cp.ladder
    lo_val, hi_val = _cantor_level_range(u)
    span = hi_val - lo_val
    f0 = (t0 - lo_val) / span
    f1 = (t1 - lo_val) / span
    n = 2 ** depth
    j0 = int(np.ceil(f0 * n - 1e-12))
    j1 = int(np.floor(f1 * n + 1e-12))
    edges_f = np.concatenate([[f0], np.arange(j0, j1 + 1) / n, [f1]])
    edges_f = np.unique(np.clip(edges_f, f0, f1))
    gx, gw = _leggauss(2)
    mid = 0.5 * (edges_f[:-1] + edges_f[1:])
    half = 0.5 * np.diff(edges_f)
    fn = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    wn = (half[:, None] * gw[None, :]).ravel() * span
    # ladder fraction for a crossing at level t: invert the monotone map
    frac = fn if cp.scale > 0 else 1.0 - fn
    xs = lad.inverse(frac)
    vals = np.asarray(g(xs), dtype=float)
    return float(np.dot(wn, vals))
