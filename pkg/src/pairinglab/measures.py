"""Signed Radon measures on intervals and rectangles, plus test functions.

1D measures carry an absolutely continuous density, finitely many atoms and
an optional singular-continuous part realized as an explicit monotone ladder
(Cantor-Vitali family).  2D measures carry an absolutely continuous part
supported on geometric patches and surface parts carried by curves.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NonFiniteValue
from .quadrature import (adaptive_simpson, circle_integral, find_sign_changes,
                         polar_quad, polygon_quad, segment_integral)

__all__ = [
    "SingularLadder",
    "RadonMeasure1D",
    "RadonMeasure2D",
    "Circle",
    "Segment",
    "DiscPatch",
    "PolygonPatch",
    "TestFunction1D",
    "TestFunction2D",
    "integrate",
    "variation",
    "restrict",
]


# ---------------------------------------------------------------------------
# Singular ladders (Cantor-Vitali family)


@dataclass(frozen=True)
class SingularLadder:
    """Monotone continuous ladder F with F' = 0 a.e., F(a)=0, F(b)=1.

    ``removed`` is the fraction of each construction interval removed in the
    middle at every level (1/3 gives the classical ladder).  ``depth`` is the
    construction depth used for exact Stieltjes summation.
    """

    interval: tuple
    removed: float = 1.0 / 3.0
    depth: int = 18
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not (0.0 < self.removed < 1.0):
            raise ValueError("removed fraction must be in (0, 1)")
        if self.interval[1] <= self.interval[0]:
            raise ValueError("carrier interval must be non-degenerate")

    @property
    def side(self):
        return 0.5 * (1.0 - self.removed)

    def evaluate(self, x):
        """Ladder value in [0, 1]; clamps outside the carrier."""
        a0, b0 = self.interval
        y = (np.asarray(x, dtype=float) - a0) / (b0 - a0)
        y = np.clip(y, 0.0, 1.0)
        s = self.side
        res = np.zeros_like(y)
        scale = np.ones_like(y)
        active = np.ones_like(y, dtype=bool)
        for _ in range(self.depth):
            left = active & (y < s)
            mid = active & (y >= s) & (y <= 1.0 - s)
            right = active & (y > 1.0 - s)
            res[mid] += 0.5 * scale[mid]
            active = active & ~mid
            res[right] += 0.5 * scale[right]
            y[right] = (y[right] - (1.0 - s)) / s
            y[left] = y[left] / s
            scale[left | right] *= 0.5
        res[active] += scale[active] * np.clip(y[active], 0.0, 1.0)
        return res

    def inverse(self, t):
        """Right-continuous inverse: x in the carrier with F(x) = t."""
        a0, b0 = self.interval
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0).copy()
        s = self.side
        y = np.zeros_like(t)
        length = np.ones_like(t)
        for _ in range(self.depth):
            hi = t >= 0.5
            t = np.where(hi, 2.0 * t - 1.0, 2.0 * t)
            y[hi] += (1.0 - s) * length[hi]
            length *= s
        y += length * t
        return a0 + y * (b0 - a0)

    def _build(self):
        if "increments" in self._cache:
            return
        s = self.side
        lo = np.array([0.0])
        val = np.array([0.0])
        length = 1.0
        mass = 1.0
        plat_lo, plat_hi, plat_val = [], [], []
        for _ in range(self.depth):
            plat_lo.append(lo + s * length)
            plat_hi.append(lo + (1.0 - s) * length)
            plat_val.append(val + 0.5 * mass)
            lo = np.stack([lo, lo + (1.0 - s) * length], axis=1).ravel()
            val = np.stack([val, val + 0.5 * mass], axis=1).ravel()
            length *= s
            mass *= 0.5
        a0, b0 = self.interval
        w = b0 - a0
        self._cache["increments"] = (
            a0 + w * lo, a0 + w * (lo + length), val + 0.5 * mass, mass)
        self._cache["plateaus"] = (
            a0 + w * np.concatenate(plat_lo),
            a0 + w * np.concatenate(plat_hi),
            np.concatenate(plat_val))

    def increments(self):
        """(lo, hi, mid_value, mass) arrays for the 2^depth retained intervals."""
        self._build()
        return self._cache["increments"]

    def plateaus(self):
        """(lo, hi, value) arrays for all removed plateau intervals."""
        self._build()
        return self._cache["plateaus"]

    def to_json(self):
        return {"kind": "cantor", "interval": list(self.interval),
                "removed": self.removed, "depth": self.depth}

    @staticmethod
    def from_json(d):
        return SingularLadder(tuple(d["interval"]), d.get("removed", 1.0 / 3.0),
                              d.get("depth", 18))


# ---------------------------------------------------------------------------
# 1D measures


def _as_vec(g):
    def wrapped(x):
        return np.broadcast_to(np.asarray(g(x), dtype=float), np.shape(x))
    return wrapped


@dataclass(frozen=True)
class RadonMeasure1D:
    interval: tuple
    ac_density: object = None
    ac_breakpoints: tuple = ()
    atoms: tuple = ()  # ((x, w), ...) strictly increasing locations
    ladder: SingularLadder = None
    ladder_scale: float = 0.0
    ladder_density: object = None  # optional density along the carrier
    ac_sign_roots: tuple = ()  # seeded kinks of |density| for variations
    empty_intersection: bool = False

    def __post_init__(self):
        xs = [a[0] for a in self.atoms]
        if any(x2 <= x1 for x1, x2 in zip(xs, xs[1:])):
            raise ValueError("atom locations must be strictly increasing")
        a, b = self.interval
        if any(not (a <= x <= b) for x in xs):
            raise ValueError("atoms must lie inside the domain interval")

    # -- construction helpers

    @staticmethod
    def zero(interval, empty_intersection=False):
        return RadonMeasure1D(interval, empty_intersection=empty_intersection)

    # -- integration

    def _ladder_terms(self, window=None):
        if self.ladder is None or self.ladder_scale == 0.0:
            return None
        lo, hi, _, mass = self.ladder.increments()
        mid = 0.5 * (lo + hi)
        if window is not None:
            keep = (mid >= window[0]) & (mid < window[1])
            mid = mid[keep]
        w = np.full(mid.shape, mass * self.ladder_scale)
        if self.ladder_density is not None:
            w = w * np.asarray(self.ladder_density(mid), dtype=float)
        return mid, w

    def integrate_detailed(self, g, tol=1e-9):
        """Returns (integral of g against the measure, error estimate)."""
        a, b = self.interval
        value = 0.0
        err = 0.0
        if self.ac_density is not None:
            dens = self.ac_density
            integrand = lambda x: np.asarray(g(x), dtype=float) * \
                np.asarray(dens(x), dtype=float)
            bps = tuple(self.ac_breakpoints) + tuple(self.ac_sign_roots) + \
                tuple(x for x, _ in self.atoms)
            value += adaptive_simpson(integrand, a, b, tol=tol, breakpoints=bps)
            err += tol
        if self.atoms:
            xs = np.array([x for x, _ in self.atoms])
            ws = np.array([w for _, w in self.atoms])
            gv = np.asarray(g(xs), dtype=float)
            if not np.all(np.isfinite(gv)):
                raise NonFiniteValue("g non-finite at an atom location")
            value += float(np.dot(gv, ws))
        lt = self._ladder_terms()
        if lt is not None:
            mid, w = lt
            gv = np.asarray(g(mid), dtype=float)
            if not np.all(np.isfinite(gv)):
                raise NonFiniteValue("g non-finite on the ladder carrier")
            value += float(np.dot(gv, w))
            # analytic tail bound for Lipschitz g: halving-interval argument
            span = self.ladder.interval[1] - self.ladder.interval[0]
            err += abs(self.ladder_scale) * span * \
                (2.0 * self.ladder.side) ** self.ladder.depth
        if not np.isfinite(value):
            raise NonFiniteValue("non-finite integral value")
        return value, err

    def integrate(self, g, tol=1e-9):
        return self.integrate_detailed(g, tol=tol)[0]

    def total_mass(self, tol=1e-9):
        return self.integrate(lambda x: np.ones_like(np.asarray(x, float)),
                              tol=tol)

    # -- variation / restriction

    def variation(self):
        dens = self.ac_density
        roots = self.ac_sign_roots
        if dens is not None and not roots:
            roots = tuple(find_sign_changes(
                _as_vec(dens), self.interval[0], self.interval[1],
                breakpoints=self.ac_breakpoints))
        abs_dens = None if dens is None else (
            lambda x, _d=dens: np.abs(np.asarray(_d(x), dtype=float)))
        ldens = self.ladder_density
        abs_ldens = None if ldens is None else (
            lambda x, _d=ldens: np.abs(np.asarray(_d(x), dtype=float)))
        return RadonMeasure1D(
            self.interval,
            ac_density=abs_dens,
            ac_breakpoints=self.ac_breakpoints,
            atoms=tuple((x, abs(w)) for x, w in self.atoms),
            ladder=self.ladder,
            ladder_scale=abs(self.ladder_scale),
            ladder_density=abs_ldens,
            ac_sign_roots=roots,
        )

    def restrict(self, window, closed_left=True, closed_right=False):
        lo = max(window[0], self.interval[0])
        hi = min(window[1], self.interval[1])
        if hi < lo or (hi == lo and not (closed_left and closed_right)):
            return RadonMeasure1D.zero(self.interval, empty_intersection=True)
        atoms = []
        for x, w in self.atoms:
            inside = lo < x < hi
            inside = inside or (x == lo and closed_left)
            inside = inside or (x == hi and closed_right)
            if inside:
                atoms.append((x, w))
        dens = self.ac_density
        masked = None if dens is None else (
            lambda x, _d=dens: np.where((np.asarray(x) >= lo)
                                        & (np.asarray(x) <= hi),
                                        np.asarray(_d(x), dtype=float), 0.0))
        ladder = self.ladder
        scale = self.ladder_scale
        ldens = self.ladder_density
        if ladder is not None and scale != 0.0:
            # keep increments whose midpoints fall in the window
            prev = ldens

            def windowed(x, _p=prev):
                base = np.ones_like(np.asarray(x, float)) if _p is None \
                    else np.asarray(_p(x), dtype=float)
                inside = (np.asarray(x) >= lo) & (np.asarray(x) < hi)
                return np.where(inside, base, 0.0)

            ldens = windowed
        bps = tuple(p for p in self.ac_breakpoints if lo <= p <= hi) + (lo, hi)
        return RadonMeasure1D(self.interval, ac_density=masked,
                              ac_breakpoints=bps, atoms=tuple(atoms),
                              ladder=ladder, ladder_scale=scale,
                              ladder_density=ldens,
                              ac_sign_roots=tuple(
                                  r for r in self.ac_sign_roots if lo <= r <= hi))

    def scaled(self, c):
        dens = self.ac_density
        sdens = None if dens is None else (
            lambda x, _d=dens: c * np.asarray(_d(x), dtype=float))
        return replace(self, ac_density=sdens,
                       atoms=tuple((x, c * w) for x, w in self.atoms),
                       ladder_scale=c * self.ladder_scale)

    # -- serialization

    def to_json(self, nsamples=129):
        a, b = self.interval
        out = {"interval": [a, b], "atoms": [[x, w] for x, w in self.atoms]}
        if self.ac_density is not None:
            xs = np.linspace(a, b, nsamples)
            xs = np.unique(np.concatenate(
                [xs, np.asarray(self.ac_breakpoints, dtype=float)]))
            out["ac"] = [[float(x), float(v)] for x, v in
                         zip(xs, np.asarray(self.ac_density(xs), dtype=float))]
        if self.ladder is not None and self.ladder_scale != 0.0:
            out["ladder"] = dict(self.ladder.to_json(),
                                 scale=self.ladder_scale)
        return out

    @staticmethod
    def from_json(d):
        ac = None
        bps = ()
        if "ac" in d:
            xs = np.array([p[0] for p in d["ac"]])
            vs = np.array([p[1] for p in d["ac"]])
            ac = lambda x: np.interp(np.asarray(x, float), xs, vs)
            bps = tuple(xs)
        ladder = None
        scale = 0.0
        if "ladder" in d:
            ladder = SingularLadder.from_json(d["ladder"])
            scale = d["ladder"].get("scale", 1.0)
        return RadonMeasure1D(tuple(d["interval"]), ac_density=ac,
                              ac_breakpoints=bps,
                              atoms=tuple((x, w) for x, w in d["atoms"]),
                              ladder=ladder, ladder_scale=scale)


# ---------------------------------------------------------------------------
# 2D measures


@dataclass(frozen=True)
class Circle:
    center: tuple
    radius: float
    param_breaks: tuple = ()  # angles where the density loses smoothness

    @property
    def length(self):
        return 2.0 * np.pi * self.radius

    def point_at(self, s):
        s = np.asarray(s, dtype=float)
        return np.stack([self.center[0] + self.radius * np.cos(s),
                         self.center[1] + self.radius * np.sin(s)], axis=-1)

    def param_range(self):
        return (0.0, 2.0 * np.pi)

    def integrate(self, g, tol=1e-10):
        return circle_integral(g, self.center, self.radius, tol=tol,
                               theta_breaks=self.param_breaks)

    def sample(self, n):
        th = (np.arange(n) + 0.5) * (2.0 * np.pi / n)
        pts = np.stack([self.center[0] + self.radius * np.cos(th),
                        self.center[1] + self.radius * np.sin(th)], axis=-1)
        return pts, np.full(n, self.length / n)


@dataclass(frozen=True)
class Segment:
    p0: tuple
    p1: tuple
    param_breaks: tuple = ()  # parameters in (0, 1), same convention

    @property
    def length(self):
        return float(np.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1]))

    def point_at(self, s):
        s = np.asarray(s, dtype=float)
        p0 = np.asarray(self.p0, float)
        p1 = np.asarray(self.p1, float)
        return p0 + s[..., None] * (p1 - p0)

    def param_range(self):
        return (0.0, 1.0)

    def integrate(self, g, tol=1e-10):
        return segment_integral(g, self.p0, self.p1, tol=tol,
                                s_breaks=self.param_breaks)

    def sample(self, n):
        s = (np.arange(n) + 0.5) / n
        p0 = np.asarray(self.p0, float)
        p1 = np.asarray(self.p1, float)
        pts = p0[None, :] + s[:, None] * (p1 - p0)[None, :]
        return pts, np.full(n, self.length / n)


@dataclass(frozen=True)
class DiscPatch:
    center: tuple
    r_outer: float
    r_inner: float = 0.0
    r_breaks: tuple = ()

    def integrate(self, g, tol=1e-9):
        return polar_quad(g, self.center, self.r_inner, self.r_outer,
                          r_breaks=self.r_breaks, tol=tol)


@dataclass(frozen=True)
class PolygonPatch:
    vertices: tuple

    def integrate(self, g, tol=1e-9):
        return polygon_quad(g, self.vertices, tol=tol)


@dataclass(frozen=True)
class RadonMeasure2D:
    rect: tuple  # ((x0, x1), (y0, y1))
    ac_parts: tuple = ()       # ((patch, density(pts)), ...)
    surface_parts: tuple = ()  # ((curve, density(pts)), ...)
    mask: object = None        # optional box ((x0,x1),(y0,y1)) restriction
    empty_intersection: bool = False

    @staticmethod
    def zero(rect, empty_intersection=False):
        return RadonMeasure2D(rect, empty_intersection=empty_intersection)

    def _mask_fn(self):
        if self.mask is None:
            return None
        (x0, x1), (y0, y1) = self.mask

        def inside(pts):
            p = np.asarray(pts, dtype=float)
            return ((p[..., 0] >= x0) & (p[..., 0] < x1)
                    & (p[..., 1] >= y0) & (p[..., 1] < y1))
        return inside

    def integrate(self, g, tol=1e-9, nsurf=8192, narea=256):
        mask = self._mask_fn()
        value = 0.0
        for patch, dens in self.ac_parts:
            f = lambda p, _d=dens: (np.asarray(g(p), dtype=float)
                                    * np.asarray(_d(p), dtype=float))
            if mask is None:
                value += patch.integrate(f, tol=tol)
            else:
                value += _masked_patch_integral(patch, f, mask, narea)
        for curve, dens in self.surface_parts:
            f = lambda p, _d=dens: (np.asarray(g(p), dtype=float)
                                    * np.asarray(_d(p), dtype=float))
            if mask is None:
                value += curve.integrate(f, tol=tol)
            else:
                pts, w = curve.sample(nsurf)
                vals = np.asarray(f(pts), dtype=float)
                value += float(np.dot(w, np.where(mask(pts), vals, 0.0)))
        if not np.isfinite(value):
            raise NonFiniteValue("non-finite 2D integral")
        return value

    def total_mass(self, tol=1e-9):
        return self.integrate(lambda p: np.ones(np.shape(p)[:-1]), tol=tol)

    def variation(self):
        ac = tuple((patch, (lambda p, _d=d: np.abs(np.asarray(_d(p), float))))
                   for patch, d in self.ac_parts)
        surf = []
        for c, d in self.surface_parts:
            # absolute densities kink where the signed density vanishes;
            # record those parameters so the line quadrature can split there
            breaks = c.param_breaks or _density_sign_breaks(c, d)
            surf.append((replace(c, param_breaks=tuple(breaks)),
                         (lambda p, _d=d: np.abs(np.asarray(_d(p), float)))))
        return replace(self, ac_parts=ac, surface_parts=tuple(surf))

    def restrict(self, box):
        (x0, x1), (y0, y1) = box
        (rx0, rx1), (ry0, ry1) = self.rect
        if x1 <= rx0 or x0 >= rx1 or y1 <= ry0 or y0 >= ry1:
            return RadonMeasure2D.zero(self.rect, empty_intersection=True)
        return replace(self, mask=box)


def _density_sign_breaks(curve, dens, n=2048):
    """Parameters along a curve where a surface density changes sign."""
    from scipy.optimize import brentq
    a, b = curve.param_range()
    s = np.linspace(a, b, n + 1)
    vals = np.asarray(dens(curve.point_at(s)), dtype=float)

    def f(t):
        return float(np.asarray(dens(curve.point_at(np.asarray([t]))))[0])

    roots = []
    flips = np.nonzero((vals[:-1] < 0) != (vals[1:] < 0))[0]
    for i in flips:
        try:
            roots.append(float(brentq(f, s[i], s[i + 1], xtol=1e-14)))
        except ValueError:
            roots.append(0.5 * (s[i] + s[i + 1]))
    return tuple(roots)


def _masked_patch_integral(patch, f, mask, narea):
    """Fixed-grid integral of a masked patch; shared scheme keeps mass-bound
    comparisons consistent between a measure and its variation."""
    if isinstance(patch, DiscPatch):
        r = np.linspace(patch.r_inner, patch.r_outer, narea + 1)
        rm = 0.5 * (r[:-1] + r[1:])
        dr = np.diff(r)
        th = (np.arange(2 * narea) + 0.5) * (2.0 * np.pi / (2 * narea))
        dth = 2.0 * np.pi / (2 * narea)
        pts = np.empty((th.size, rm.size, 2))
        pts[..., 0] = patch.center[0] + rm[None, :] * np.cos(th)[:, None]
        pts[..., 1] = patch.center[1] + rm[None, :] * np.sin(th)[:, None]
        w = (rm * dr)[None, :] * dth
        vals = np.where(mask(pts), np.asarray(f(pts), dtype=float), 0.0)
        return float(np.sum(vals * w))
    verts = np.asarray(patch.vertices, dtype=float)
    x0, y0 = verts.min(axis=0)
    x1, y1 = verts.max(axis=0)
    xs = np.linspace(x0, x1, narea + 1)
    ys = np.linspace(y0, y1, narea + 1)
    xm = 0.5 * (xs[:-1] + xs[1:])
    ym = 0.5 * (ys[:-1] + ys[1:])
    X, Y = np.meshgrid(xm, ym, indexing="ij")
    pts = np.stack([X, Y], axis=-1)
    inside = mask(pts) & _points_in_polygon(pts, verts)
    vals = np.where(inside, np.asarray(f(pts), dtype=float), 0.0)
    cell = (xs[1] - xs[0]) * (ys[1] - ys[0])
    return float(np.sum(vals) * cell)


def _points_in_polygon(pts, verts):
    x = pts[..., 0]
    y = pts[..., 1]
    inside = np.zeros(x.shape, dtype=bool)
    n = verts.shape[0]
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        # horizontal edges (y0 == y1) never satisfy the crossing test,
        # so the guarded denominator does not affect the result
        with np.errstate(divide="ignore", invalid="ignore"):
            cond = ((y0 > y) != (y1 > y)) & \
                (x < (x1 - x0) * (y - y0) / (y1 - y0) + x0)
        inside ^= cond
    return inside


# ---------------------------------------------------------------------------
# Test functions


@dataclass(frozen=True)
class TestFunction1D:
    evaluate: object
    gradient: object
    support: tuple
    sup_norm: float
    grad_sup_norm: float
    in_unit_class: bool = True  # 0 <= phi <= 1
    breakpoints: tuple = ()  # kinks of the gradient, for quadrature seeding

    def __call__(self, x):
        return self.evaluate(x)

    @staticmethod
    def bump(a, b):
        """Quartic bump on (a, b), max value 1."""
        c = 0.5 * (a + b)
        h = 0.5 * (b - a)

        def ev(x):
            s = (np.asarray(x, dtype=float) - c) / h
            return np.where(np.abs(s) < 1.0, (1.0 - s * s) ** 2, 0.0)

        def gr(x):
            s = (np.asarray(x, dtype=float) - c) / h
            return np.where(np.abs(s) < 1.0, -4.0 * s * (1.0 - s * s) / h, 0.0)

        gmax = 4.0 / h * (1.0 / np.sqrt(3.0)) * (2.0 / 3.0)
        return TestFunction1D(ev, gr, (a, b), 1.0, gmax, breakpoints=(a, b))

    @staticmethod
    def plateau(a, p, q, b):
        """C^1 bump equal to 1 on [p, q], supported on (a, b)."""
        assert a < p <= q < b

        def smooth(t):
            t = np.clip(t, 0.0, 1.0)
            return 3.0 * t * t - 2.0 * t ** 3

        def dsmooth(t):
            inside = (t > 0.0) & (t < 1.0)
            return np.where(inside, 6.0 * t * (1.0 - t), 0.0)

        def ev(x):
            x = np.asarray(x, dtype=float)
            up = smooth((x - a) / (p - a))
            down = smooth((b - x) / (b - q))
            return np.where(x < p, up, np.where(x > q, down, 1.0))

        def gr(x):
            x = np.asarray(x, dtype=float)
            up = dsmooth((x - a) / (p - a)) / (p - a)
            down = -dsmooth((b - x) / (b - q)) / (b - q)
            return np.where(x < p, up, np.where(x > q, down, 0.0))

        gmax = 1.5 * max(1.0 / (p - a), 1.0 / (b - q))
        return TestFunction1D(ev, gr, (a, b), 1.0, gmax,
                              breakpoints=(a, p, q, b))


def _radial_profile(r0, r1, r2, r3):
    """C^1 profile of r: rises on [r0,r1], 1 on [r1,r2], falls on [r2,r3]."""

    def smooth(t):
        t = np.clip(t, 0.0, 1.0)
        return 3.0 * t * t - 2.0 * t ** 3

    def dsmooth(t):
        inside = (t > 0.0) & (t < 1.0)
        return np.where(inside, 6.0 * t * (1.0 - t), 0.0)

    def psi(r):
        r = np.asarray(r, dtype=float)
        if r0 == r1:
            up = np.ones_like(r)
        else:
            up = smooth((r - r0) / (r1 - r0))
        down = smooth((r3 - r) / (r3 - r2))
        out = np.where(r < r1, up, np.where(r > r2, down, 1.0))
        return np.where((r < r0) | (r > r3), 0.0, out)

    def dpsi(r):
        r = np.asarray(r, dtype=float)
        if r0 == r1:
            up = np.zeros_like(r)
        else:
            up = dsmooth((r - r0) / (r1 - r0)) / (r1 - r0)
        down = -dsmooth((r3 - r) / (r3 - r2)) / (r3 - r2)
        out = np.where(r < r1, up, np.where(r > r2, down, 0.0))
        return np.where((r < r0) | (r > r3), 0.0, out)

    return psi, dpsi


@dataclass(frozen=True)
class TestFunction2D:
    evaluate: object
    gradient: object
    support: tuple  # ("disc", center, r) | ("annulus", center, r0, r1) | ("box", xr, yr)
    sup_norm: float
    grad_sup_norm: float
    in_unit_class: bool = True
    radial_breaks: tuple = ()  # radii of profile kinks, for quadrature seeding

    def __call__(self, pts):
        return self.evaluate(pts)

    @staticmethod
    def radial(center, r_plateau, r_out, r_in0=0.0, r_in1=0.0):
        """Radial plateau bump; annular when r_in0 < r_in1."""
        psi, dpsi = _radial_profile(r_in0, r_in1, r_plateau, r_out)
        cx, cy = center

        def ev(pts):
            p = np.asarray(pts, dtype=float)
            r = np.hypot(p[..., 0] - cx, p[..., 1] - cy)
            return psi(r)

        def gr(pts):
            p = np.asarray(pts, dtype=float)
            dx = p[..., 0] - cx
            dy = p[..., 1] - cy
            r = np.hypot(dx, dy)
            safe = np.where(r > 0.0, r, 1.0)
            fac = dpsi(r) / safe
            return np.stack([fac * dx, fac * dy], axis=-1)

        rr = np.linspace(0, r_out, 4001)
        gmax = float(np.abs(dpsi(rr)).max())
        if r_in1 > r_in0:
            support = ("annulus", center, r_in0, r_out)
        else:
            support = ("disc", center, r_out)
        return TestFunction2D(ev, gr, support, 1.0, gmax,
                              radial_breaks=(r_in0, r_in1, r_plateau, r_out))

    @staticmethod
    def box(xr, yr, margin=0.25):
        """Product of 1D plateau bumps; equals 1 on the inner box."""
        fx = TestFunction1D.plateau(xr[0], xr[0] + margin, xr[1] - margin, xr[1])
        fy = TestFunction1D.plateau(yr[0], yr[0] + margin, yr[1] - margin, yr[1])

        def ev(pts):
            p = np.asarray(pts, dtype=float)
            return fx.evaluate(p[..., 0]) * fy.evaluate(p[..., 1])

        def gr(pts):
            p = np.asarray(pts, dtype=float)
            gx = fx.gradient(p[..., 0]) * fy.evaluate(p[..., 1])
            gy = fx.evaluate(p[..., 0]) * fy.gradient(p[..., 1])
            return np.stack([gx, gy], axis=-1)

        gmax = max(fx.grad_sup_norm, fy.grad_sup_norm)
        return TestFunction2D(ev, gr, ("box", tuple(xr), tuple(yr)), 1.0, gmax)


# ---------------------------------------------------------------------------
# Module-level operation aliases


def integrate(m, g, tol=1e-9):
    return m.integrate(g, tol=tol)


def variation(m):
    return m.variation()


def restrict(m, window, **kw):
    return m.restrict(window, **kw)
