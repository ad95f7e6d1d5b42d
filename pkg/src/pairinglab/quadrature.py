"""Quadrature utilities used across the package.

All integrand callables are expected to be numpy-vectorized: they receive
arrays of abscissae and return arrays of the same shape (2D integrands
receive arrays of shape (..., 2)).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import NonFiniteValue, ToleranceNotMet

__all__ = [
    "fixed_gauss",
    "adaptive_simpson",
    "composite_gauss",
    "find_sign_changes",
    "integrate_abs",
    "aitken",
    "polar_quad",
    "polygon_quad",
    "circle_integral",
    "segment_integral",
]


@lru_cache(maxsize=64)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gauss_nodes(a, b, n):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _leggauss(n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return mid + half * x, half * w


def fixed_gauss(f, a, b, n=16):
    x, w = gauss_nodes(a, b, n)
    return float(np.dot(w, np.asarray(f(x), dtype=float)))


def _clean_breakpoints(a, b, breakpoints):
    pts = [a, b]
    for p in breakpoints:
        if a < p < b:
            pts.append(float(p))
    pts = np.array(sorted(set(pts)))
    return pts


def adaptive_simpson(f, a, b, tol=1e-9, breakpoints=(), max_nodes=2_000_000):
    """Adaptive composite Simpson with interval bisection.

    Mandatory breakpoints seed the initial panels so that known kinks never
    sit inside a panel.  Intervals are processed in batches so that ``f``
    is always called on arrays.
    """
    if b <= a:
        return 0.0
    pts = _clean_breakpoints(a, b, breakpoints)
    lo = pts[:-1]
    hi = pts[1:]
    mid = 0.5 * (lo + hi)
    all_x = np.concatenate([lo, mid, hi])
    vals = np.asarray(f(all_x), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue("integrand produced non-finite values")
    n = lo.size
    flo, fmid, fhi = vals[:n], vals[n : 2 * n], vals[2 * n :]
    S = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    total_len = b - a
    result = 0.0
    nodes_used = all_x.size
    # state arrays for pending intervals
    while lo.size:
        m1 = 0.5 * (lo + mid)
        m2 = 0.5 * (mid + hi)
        fm = np.asarray(f(np.concatenate([m1, m2])), dtype=float)
        if not np.all(np.isfinite(fm)):
            raise NonFiniteValue("integrand produced non-finite values")
        nodes_used += fm.size
        k = lo.size
        f1, f2 = fm[:k], fm[k:]
        Sl = (mid - lo) / 6.0 * (flo + 4.0 * f1 + fmid)
        Sr = (hi - mid) / 6.0 * (fmid + 4.0 * f2 + fhi)
        err = np.abs(Sl + Sr - S)
        budget = tol * np.maximum((hi - lo) / total_len, 1e-300)
        done = (err <= budget) | (hi - lo < 1e-14 * total_len)
        result += float(np.sum((Sl + Sr + (Sl + Sr - S) / 15.0)[done]))
        keep = ~done
        if nodes_used > max_nodes:
            raise ToleranceNotMet(
                f"adaptive Simpson stalled: {int(keep.sum())} intervals above "
                f"tolerance after {nodes_used} evaluations"
            )
        # split the remaining intervals
        lo2 = np.concatenate([lo[keep], mid[keep]])
        hi2 = np.concatenate([mid[keep], hi[keep]])
        mid2 = np.concatenate([m1[keep], m2[keep]])
        flo2 = np.concatenate([flo[keep], fmid[keep]])
        fhi2 = np.concatenate([fmid[keep], fhi[keep]])
        fmid2 = np.concatenate([f1[keep], f2[keep]])
        S2 = np.concatenate([Sl[keep], Sr[keep]])
        lo, mid, hi, flo, fmid, fhi, S = lo2, mid2, hi2, flo2, fmid2, fhi2, S2
    return result


def composite_gauss(f, a, b, breakpoints=(), tol=1e-10, n=8, min_panels=2,
                    max_doublings=12):
    """Composite Gauss-Legendre with uniform panel doubling until converged.

    Faster than adaptive Simpson for smooth integrands evaluated inside hot
    loops; intended for integrands known to be smooth between breakpoints.
    """
    if b <= a:
        return 0.0
    pts = _clean_breakpoints(a, b, breakpoints)
    panels = max(min_panels, pts.size - 1)

    def value(k):
        # k subdivisions of every base panel
        edges = []
        for lo, hi in zip(pts[:-1], pts[1:]):
            edges.append(np.linspace(lo, hi, k + 1))
        xs = []
        ws = []
        gx, gw = _leggauss(n)
        for e in edges:
            lo, hi = e[:-1], e[1:]
            mid = 0.5 * (lo + hi)
            half = 0.5 * (hi - lo)
            xs.append((mid[:, None] + half[:, None] * gx[None, :]).ravel())
            ws.append((half[:, None] * gw[None, :]).ravel())
        x = np.concatenate(xs)
        w = np.concatenate(ws)
        fx = np.asarray(f(x), dtype=float)
        if not np.all(np.isfinite(fx)):
            raise NonFiniteValue("integrand produced non-finite values")
        return float(np.dot(w, fx))

    prev = value(1)
    k = 2
    for _ in range(max_doublings):
        cur = value(k)
        if abs(cur - prev) <= tol * (1.0 + abs(cur)):
            return cur
        prev = cur
        k *= 2
    raise ToleranceNotMet(f"composite Gauss did not converge on [{a}, {b}]")


def find_sign_changes(f, a, b, breakpoints=(), grid=4001):
    """Locate the zeros of ``f`` by dense sampling plus Brent refinement."""
    pts = _clean_breakpoints(a, b, breakpoints)
    roots = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        npts = max(16, int(grid * (hi - lo) / (b - a)))
        x = np.linspace(lo, hi, npts)
        y = np.asarray(f(x), dtype=float)
        s = np.sign(y)
        idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
        for i in idx:
            try:
                roots.append(brentq(lambda z: float(f(np.array([z]))[0]),
                                    x[i], x[i + 1], xtol=1e-14))
            except ValueError:
                pass
    return sorted(roots)


def integrate_abs(f, a, b, tol=1e-9, breakpoints=(), grid=4001):
    """Integrate ``|f|`` by splitting at sign changes of ``f``."""
    roots = find_sign_changes(f, a, b, breakpoints=breakpoints, grid=grid)
    bps = list(breakpoints) + roots
    val = adaptive_simpson(lambda x: np.abs(f(x)), a, b, tol=tol,
                           breakpoints=bps)
    return val


def aitken(seq):
    """Aitken delta-squared acceleration; returns the accelerated tail value.

    Falls back to the last raw element when the sequence is too short or the
    denominators degenerate.
    """
    s = np.asarray(seq, dtype=float)
    if s.size < 3:
        return float(s[-1])
    while s.size >= 3:
        d1 = s[1:-1] - s[:-2]
        d2 = s[2:] - 2.0 * s[1:-1] + s[:-2]
        with np.errstate(divide="ignore", invalid="ignore"):
            acc = s[:-2] - d1 * d1 / d2
        ok = np.isfinite(acc)
        if not ok.any():
            return float(s[-1])
        s = acc[ok]
        if s.size == 1:
            return float(s[-1])
        # one extra pass usually suffices; avoid noise amplification
        if np.abs(np.diff(s)).max() < 1e-15 * (1.0 + np.abs(s[-1])):
            return float(s[-1])
    return float(s[-1])


# ---------------------------------------------------------------------------
# 2D quadrature


def _polar_value(f, center, r0, r1, r_edges, ntheta, nr, theta0=0.0,
                 theta1=2.0 * np.pi):
    gx, gw = _leggauss(8)
    # theta panels
    tedges = np.linspace(theta0, theta1, ntheta + 1)
    tmid = 0.5 * (tedges[:-1] + tedges[1:])
    thalf = 0.5 * np.diff(tedges)
    tn = (tmid[:, None] + thalf[:, None] * gx[None, :]).ravel()
    tw = (thalf[:, None] * gw[None, :]).ravel()
    # radial panels
    redges = []
    for lo, hi in zip(r_edges[:-1], r_edges[1:]):
        redges.append(np.linspace(lo, hi, nr + 1))
    rn_list, rw_list = [], []
    for e in redges:
        lo, hi = e[:-1], e[1:]
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        rn_list.append((mid[:, None] + half[:, None] * gx[None, :]).ravel())
        rw_list.append((half[:, None] * gw[None, :]).ravel())
    rn = np.concatenate(rn_list)
    rw = np.concatenate(rw_list)
    pts = np.empty((tn.size, rn.size, 2))
    pts[..., 0] = center[0] + rn[None, :] * np.cos(tn)[:, None]
    pts[..., 1] = center[1] + rn[None, :] * np.sin(tn)[:, None]
    vals = np.asarray(f(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue("2D integrand produced non-finite values")
    return float(np.einsum("i,j,ij->", tw, rw * rn, vals))


def polar_quad(f, center, r0, r1, r_breaks=(), tol=1e-9, theta_range=None,
               max_levels=7):
    """Integrate f over the annulus r0 <= |x-center| <= r1 in polar form.

    ``f`` receives an array of points of shape (..., 2).
    """
    if r1 <= r0:
        return 0.0
    center = np.asarray(center, dtype=float)
    edges = [r0, r1] + [r for r in r_breaks if r0 < r < r1]
    edges = sorted(set(edges))
    t0, t1 = (0.0, 2.0 * np.pi) if theta_range is None else theta_range
    ntheta, nr = 4, 1
    prev = _polar_value(f, center, r0, r1, edges, ntheta, nr, t0, t1)
    for _ in range(max_levels):
        ntheta *= 2
        nr *= 2
        cur = _polar_value(f, center, r0, r1, edges, ntheta, nr, t0, t1)
        if abs(cur - prev) <= tol * (1.0 + abs(cur)):
            return cur
        prev = cur
    raise ToleranceNotMet("polar quadrature did not converge")


def _triangle_value(f, tris, n):
    # Duffy transform on each triangle: collapsed tensor Gauss
    gx, gw = _leggauss(n)
    xi = 0.5 * (gx + 1.0)
    wi = 0.5 * gw
    XI, ETA = np.meshgrid(xi, xi, indexing="ij")
    W = np.outer(wi, wi) * XI  # jacobian of duffy map
    u = XI * (1.0 - ETA)
    v = XI * ETA
    v0 = tris[:, 0]
    e1 = tris[:, 1] - tris[:, 0]
    e2 = tris[:, 2] - tris[:, 0]
    area2 = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    pts = (v0[:, None, None, :]
           + u[None, :, :, None] * e1[:, None, None, :]
           + v[None, :, :, None] * e2[:, None, None, :])
    vals = np.asarray(f(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue("2D integrand produced non-finite values")
    return float(np.einsum("t,ij,tij->", area2, W, vals))


def _subdivide(tris):
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab = 0.5 * (a + b)
    bc = 0.5 * (b + c)
    ca = 0.5 * (c + a)
    return np.concatenate([
        np.stack([a, ab, ca], axis=1),
        np.stack([ab, b, bc], axis=1),
        np.stack([ca, bc, c], axis=1),
        np.stack([ab, bc, ca], axis=1),
    ])


def polygon_quad(f, vertices, tol=1e-9, n=8, max_levels=5):
    """Integrate f over a simple polygon via fan triangulation + Duffy Gauss."""
    verts = np.asarray(vertices, dtype=float)
    centroid = verts.mean(axis=0)
    tris = np.stack([
        np.broadcast_to(centroid, (verts.shape[0], 2)),
        verts,
        np.roll(verts, -1, axis=0),
    ], axis=1)
    prev = _triangle_value(f, tris, n)
    for _ in range(max_levels):
        tris = _subdivide(tris)
        cur = _triangle_value(f, tris, n)
        if abs(cur - prev) <= tol * (1.0 + abs(cur)):
            return cur
        prev = cur
    raise ToleranceNotMet("polygon quadrature did not converge")


def _break_edges(a, b, breaks, npanels):
    """Panel edges on [a, b] honoring interior breakpoints."""
    cuts = [a] + sorted(p for p in breaks if a < p < b) + [b]
    parts = []
    for lo, hi in zip(cuts, cuts[1:]):
        n = max(1, int(round(npanels * (hi - lo) / (b - a))))
        parts.append(np.linspace(lo, hi, n + 1)[:-1])
    return np.concatenate(parts + [np.asarray([b])])


def circle_integral(g, center, radius, tol=1e-10, max_levels=10,
                    theta_breaks=()):
    """Line integral over a circle; ``g`` receives points of shape (..., 2)."""
    center = np.asarray(center, dtype=float)

    def value(npanels):
        gx, gw = _leggauss(8)
        edges = _break_edges(0.0, 2.0 * np.pi, theta_breaks, npanels)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * np.diff(edges)
        th = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        w = (half[:, None] * gw[None, :]).ravel() * radius
        pts = np.stack([center[0] + radius * np.cos(th),
                        center[1] + radius * np.sin(th)], axis=-1)
        return float(np.dot(w, np.asarray(g(pts), dtype=float)))

    npanels = 4
    prev = value(npanels)
    for _ in range(max_levels):
        npanels *= 2
        cur = value(npanels)
        if abs(cur - prev) <= tol * (1.0 + abs(cur)):
            return cur
        prev = cur
    raise ToleranceNotMet("circle integral did not converge")


def segment_integral(g, p0, p1, tol=1e-10, max_levels=10, s_breaks=()):
    """Line integral over the segment [p0, p1]."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    length = float(np.linalg.norm(p1 - p0))
    if length == 0.0:
        return 0.0

    def value(npanels):
        gx, gw = _leggauss(8)
        edges = _break_edges(0.0, 1.0, s_breaks, npanels)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * np.diff(edges)
        s = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        w = (half[:, None] * gw[None, :]).ravel() * length
        pts = p0[None, :] + s[:, None] * (p1 - p0)[None, :]
        return float(np.dot(w, np.asarray(g(pts), dtype=float)))

    npanels = 1
    prev = value(npanels)
    for _ in range(max_levels):
        npanels *= 2
        cur = value(npanels)
        if abs(cur - prev) <= tol * (1.0 + abs(cur)):
            return cur
        prev = cur
    raise ToleranceNotMet("segment integral did not converge")
