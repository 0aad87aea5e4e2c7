"""Continuous geometry over cube-curve tubes.

All coordinates are in grid units.  Containment treats cubes as closed and
widens membership by a tolerance band `tau`: converged path vertices are
generally irrational, so exact boundary predicates are meaningless in
floating point, and a point within tau of a tube cube counts as inside.
tau defaults to 1e-9, far below any geometric feature of the unit grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .cube_model import CriticalEdge, CubeCurve

Point3 = tuple[float, float, float]


class Segment3(NamedTuple):
    a: Point3
    b: Point3


@dataclass(frozen=True)
class Tolerance:
    """Geometric boundary tolerance in grid units."""

    tau: float = 1e-9

    def __post_init__(self):
        if not (0.0 < self.tau < 0.5):
            raise ValueError(f"tau must be in (0, 0.5), got {self.tau}")


DEFAULT_TOL = Tolerance()


class DegenerateTriangle(ValueError):
    """The three triangle vertices are collinear within tolerance."""


# ---------------------------------------------------------------------------
# Small vector helpers
# ---------------------------------------------------------------------------

def dist(a: Point3, b: Point3) -> float:
    return math.sqrt(
        (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2
    )


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


# ---------------------------------------------------------------------------
# Point and segment containment
# ---------------------------------------------------------------------------

def _cell_candidates(v: float, tau: float) -> tuple[int, ...]:
    # Integer cells c with c - tau <= v <= c + 1 + tau.  There is always the
    # floor cell; near a grid plane the neighbour on the other side also
    # qualifies through the tau band.
    f = math.floor(v)
    frac = v - f
    if frac <= tau:
        return (f, f - 1)
    if frac >= 1.0 - tau:
        return (f, f + 1)
    return (f,)


def _point_in(x: float, y: float, z: float, tube, tau: float) -> bool:
    for cx in _cell_candidates(x, tau):
        for cy in _cell_candidates(y, tau):
            for cz in _cell_candidates(z, tau):
                if (cx, cy, cz) in tube:
                    return True
    return False


def point_in_tube(p: Point3, curve: CubeCurve, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff `p` lies in some closed cube of the tube, widened by tau."""
    return _point_in(p[0], p[1], p[2], curve.tube, tol.tau)


def _crossing_params(p0: float, d: float, out: list[float]) -> None:
    # Parameters in (0,1) where p0 + t*d crosses an integer grid plane.
    if d == 0.0:
        return
    lo, hi = (p0, p0 + d) if d > 0.0 else (p0 + d, p0)
    k0 = math.floor(lo) + 1
    k1 = math.floor(hi)
    if hi == k1:  # exact integer endpoint: the plane is the endpoint itself
        k1 -= 1
    for k in range(k0, k1 + 1):
        t = (k - p0) / d
        if 0.0 < t < 1.0:
            out.append(t)


def _segment_in(ax, ay, az, bx, by, bz, tube, tau) -> bool:
    if not _point_in(ax, ay, az, tube, tau):
        return False
    if not _point_in(bx, by, bz, tube, tau):
        return False
    dx, dy, dz = bx - ax, by - ay, bz - az
    ts: list[float] = []
    _crossing_params(ax, dx, ts)
    _crossing_params(ay, dy, ts)
    _crossing_params(az, dz, ts)
    if not ts:
        m = 0.5
        return _point_in(ax + m * dx, ay + m * dy, az + m * dz, tube, tau)
    ts.sort()
    prev = 0.0
    for t in ts:
        if t - prev > 1e-14:
            m = (prev + t) * 0.5
            if not _point_in(ax + m * dx, ay + m * dy, az + m * dz, tube, tau):
                return False
        prev = t
    if 1.0 - prev > 1e-14:
        m = (prev + 1.0) * 0.5
        if not _point_in(ax + m * dx, ay + m * dy, az + m * dz, tube, tau):
            return False
    return True


def segment_in_tube(s: Segment3 | tuple[Point3, Point3], curve: CubeCurve,
                    tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff every point of the segment lies in the closed tube (within tau).

    Works by parametric slab stepping: the segment is cut at every grid-plane
    crossing, and the midpoint of each resulting sub-interval is tested with
    the tau-widened closed-cube membership.  A sub-interval lies in a single
    closed cell, so its midpoint decides it; segments running exactly along
    shared faces or grid edges are inside whenever some incident cube at each
    point belongs to the tube, which the widened point test covers.
    """
    (a, b) = s
    return _segment_in(a[0], a[1], a[2], b[0], b[1], b[2], curve.tube, tol.tau)


# ---------------------------------------------------------------------------
# Triangle vs critical edges (OP2 candidates)
# ---------------------------------------------------------------------------

def _point_to_segment_dist(p: Point3, a: Point3, c: Point3) -> float:
    d = _sub(c, a)
    dd = _dot(d, d)
    if dd == 0.0:
        return dist(p, a)
    s = _dot(_sub(p, a), d) / dd
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    q = (a[0] + s * d[0], a[1] + s * d[1], a[2] + s * d[2])
    return dist(p, q)


def _closest_edge_param_to_segment(e: CriticalEdge, t0: float, t1: float,
                                   a: Point3, c: Point3) -> float:
    """Argmin over t in [t0,t1] of distance from e.point(t) to segment ac.

    The distance is convex in t; the minimum over [t0,t1] is at an interval
    endpoint or at the unconstrained minimizer of one of the three pieces
    (distance to the line through ac, or to either endpoint).
    """
    o = e.point(0.0)
    axis = int(e.axis)
    cands = [t0, t1]
    # piece: distance to endpoint a resp. c -> projection on the edge axis
    cands.append(a[axis] - o[axis])
    cands.append(c[axis] - o[axis])
    # piece: distance to the infinite line through a,c
    d = _sub(c, a)
    dd = _dot(d, d)
    if dd > 0.0:
        w0 = _sub(o, a)
        ud = d[axis] / dd
        denom = 1.0 - d[axis] * ud
        if denom > 1e-15:
            b_coef = w0[axis] - _dot(w0, d) * ud
            cands.append(-b_coef / denom)
    best_t = t0
    best = float("inf")
    for t in cands:
        if t < t0:
            t = t0
        elif t > t1:
            t = t1
        val = _point_to_segment_dist(e.point(t), a, c)
        if val < best:
            best = val
            best_t = t
    return best_t


def _coplanar_overlap(e: CriticalEdge, a: Point3, b: Point3, c: Point3,
                      n: Point3) -> tuple[float, float] | None:
    """Parameter interval of the edge inside triangle abc, both coplanar."""
    drop = max(range(3), key=lambda i: abs(n[i]))
    keep = [i for i in range(3) if i != drop]

    def proj(p):
        return (p[keep[0]], p[keep[1]])

    a2, b2, c2 = proj(a), proj(b), proj(c)
    o2 = proj(e.point(0.0))
    u2 = proj(e.point(1.0))
    du = (u2[0] - o2[0], u2[1] - o2[1])

    area2 = (b2[0] - a2[0]) * (c2[1] - a2[1]) - (b2[1] - a2[1]) * (c2[0] - a2[0])
    if area2 == 0.0:
        return None
    orient = 1.0 if area2 > 0.0 else -1.0

    t_lo, t_hi = 0.0, 1.0
    eps = 1e-12
    for p2, q2 in ((a2, b2), (b2, c2), (c2, a2)):
        ex, ey = q2[0] - p2[0], q2[1] - p2[1]
        # signed offset of edge point from triangle side, linear in t
        f0 = orient * (ex * (o2[1] - p2[1]) - ey * (o2[0] - p2[0]))
        f1 = orient * (ex * (o2[1] + du[1] - p2[1]) - ey * (o2[0] + du[0] - p2[0]))
        df = f1 - f0
        if abs(df) < 1e-15:
            if f0 < -eps:
                return None
            continue
        t_cross = -f0 / df
        if df > 0.0:
            t_lo = max(t_lo, t_cross)
        else:
            t_hi = min(t_hi, t_cross)
    if t_lo > t_hi + 1e-12:
        return None
    return (max(0.0, min(1.0, t_lo)), max(0.0, min(1.0, t_hi)))


def triangle_critical_intersections(
    a: Point3,
    b: Point3,
    c: Point3,
    curve: CubeCurve,
    edge_indices: Iterable[int] | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> list[tuple[CriticalEdge, Point3]]:
    """Intersection points of the closed triangle abc with critical edges.

    `edge_indices` restricts (and orders) the critical edges tested; None
    tests all in cyclic order.  For a coplanar triangle/edge overlap the
    representative point returned is the overlap point closest to segment ac,
    which is the deterministic single candidate the path-contraction step
    needs.  Raises DegenerateTriangle when a, b, c are collinear within tau
    (callers fall back to plain segment tests).
    """
    ab = _sub(b, a)
    ac = _sub(c, a)
    n = _cross(ab, ac)
    n_len = math.sqrt(_dot(n, n))
    ac_len = math.sqrt(_dot(ac, ac))
    # height of b over line ac = |n| / |ac|
    if n_len <= tol.tau * max(ac_len, 1e-30):
        raise DegenerateTriangle("triangle vertices are collinear within tolerance")

    edges = curve.critical_edges
    indices = range(len(edges)) if edge_indices is None else edge_indices

    d00 = _dot(ab, ab)
    d01 = _dot(ab, ac)
    d11 = _dot(ac, ac)
    den = d00 * d11 - d01 * d01
    plane_eps = tol.tau * n_len
    bary_eps = 1e-9

    out: list[tuple[CriticalEdge, Point3]] = []
    for idx in indices:
        e = edges[idx]
        o = e.point(0.0)
        s0 = _dot(n, _sub(o, a))
        s1 = s0 + n[int(e.axis)]
        if abs(s0) <= plane_eps and abs(s1) <= plane_eps:
            span = _coplanar_overlap(e, a, b, c, n)
            if span is None:
                continue
            t = _closest_edge_param_to_segment(e, span[0], span[1], a, c)
            out.append((e, e.point(t)))
            continue
        if (s0 > plane_eps and s1 > plane_eps) or (s0 < -plane_eps and s1 < -plane_eps):
            continue
        denom = s0 - s1
        if denom == 0.0:
            continue
        t = s0 / denom
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        q = e.point(t)
        v2 = _sub(q, a)
        d20 = _dot(v2, ab)
        d21 = _dot(v2, ac)
        if den <= 0.0:
            continue
        u = (d11 * d20 - d01 * d21) / den
        w = (d00 * d21 - d01 * d20) / den
        if u >= -bary_eps and w >= -bary_eps and u + w <= 1.0 + bary_eps:
            out.append((e, q))
    return out


def segment_critical_intersections(
    a: Point3,
    c: Point3,
    curve: CubeCurve,
    edge_indices: Iterable[int] | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> list[tuple[CriticalEdge, Point3]]:
    """Critical edges the segment ac passes within tau of.

    Degenerate-triangle fallback for the contraction step: each listed edge
    contributes its closest point to the segment when the two come within
    tau of each other.
    """
    edges = curve.critical_edges
    indices = range(len(edges)) if edge_indices is None else edge_indices
    out: list[tuple[CriticalEdge, Point3]] = []
    for idx in indices:
        e = edges[idx]
        t = _closest_edge_param_to_segment(e, 0.0, 1.0, a, c)
        p = e.point(t)
        if _point_to_segment_dist(p, a, c) <= tol.tau:
            out.append((e, p))
    return out


# ---------------------------------------------------------------------------
# OP3: distance-sum minimization on an axis-aligned unit edge
# ---------------------------------------------------------------------------

def _op3_param(origin, axis: int, p: Point3, q: Point3) -> float:
    """Minimizer of |p - E(t)| + |E(t) - q| over t in [0,1].

    E(t) = origin + t * axis unit vector.  Unfolding the two points about the
    edge's line into a common plane makes the problem a straight segment
    crossing the line: with parallel coordinates pp, qq and radial distances
    pr, qr the optimum is the weighted average (pp*qr + qq*pr) / (pr + qr),
    clamped to [0,1].  When both points lie on the line the objective is flat
    on the interval between them and the midpoint of its overlap with [0,1]
    is returned.
    """
    ox, oy, oz = origin
    if axis == 0:
        pp = p[0] - ox
        qq = q[0] - ox
        pr = math.hypot(p[1] - oy, p[2] - oz)
        qr = math.hypot(q[1] - oy, q[2] - oz)
    elif axis == 1:
        pp = p[1] - oy
        qq = q[1] - oy
        pr = math.hypot(p[0] - ox, p[2] - oz)
        qr = math.hypot(q[0] - ox, q[2] - oz)
    else:
        pp = p[2] - oz
        qq = q[2] - oz
        pr = math.hypot(p[0] - ox, p[1] - oy)
        qr = math.hypot(q[0] - ox, q[1] - oy)

    s = pr + qr
    if s > 0.0:
        t = (pp * qr + qq * pr) / s
    else:
        lo, hi = (pp, qq) if pp <= qq else (qq, pp)
        flo, fhi = max(lo, 0.0), min(hi, 1.0)
        if flo <= fhi:
            return (flo + fhi) * 0.5
        t = 0.0 if hi < 0.0 else 1.0
    if t < 0.0:
        return 0.0
    if t > 1.0:
        return 1.0
    return t


def op3_optimize(prev: Point3, nxt: Point3, e: CriticalEdge) -> tuple[float, Point3]:
    """Optimal position on critical edge `e` between neighbours prev and nxt.

    Returns (t, point) minimizing the distance sum; exact up to rounding.
    """
    t = _op3_param(e.origin, int(e.axis), prev, nxt)
    return t, e.point(t)


def min_dist_sum_on_segment(p: Point3, q: Point3, s0: Point3, s1: Point3) -> tuple[float, Point3]:
    """Minimizer of |p - S(w)| + |S(w) - q| over the segment S(w)=s0+w*(s1-s0).

    General-direction counterpart of :func:`op3_optimize`, used by the
    face-based solver for its two 1D sweeps.  Returns (w, point) with w in
    [0,1].
    """
    d = _sub(s1, s0)
    L = math.sqrt(_dot(d, d))
    if L == 0.0:
        return 0.0, s0
    inv = 1.0 / L
    u = (d[0] * inv, d[1] * inv, d[2] * inv)
    rp = _sub(p, s0)
    rq = _sub(q, s0)
    pp = _dot(rp, u)
    qq = _dot(rq, u)
    pr = math.sqrt(max(_dot(rp, rp) - pp * pp, 0.0))
    qr = math.sqrt(max(_dot(rq, rq) - qq * qq, 0.0))
    s = pr + qr
    if s > 0.0:
        t = (pp * qr + qq * pr) / s
    else:
        lo, hi = (pp, qq) if pp <= qq else (qq, pp)
        flo, fhi = max(lo, 0.0), min(hi, L)
        if flo <= fhi:
            t = (flo + fhi) * 0.5
        else:
            t = 0.0 if hi < 0.0 else L
    if t < 0.0:
        t = 0.0
    elif t > L:
        t = L
    w = t * inv
    return w, (s0[0] + w * d[0], s0[1] + w * d[1], s0[2] + w * d[2])
