"""Rubberband solvers: iterative contraction of a closed path inside a tube.

Three variants share one sweep loop and the break-off rule "stop when the
length gained by a full pass drops below epsilon":

* ``original``  - the historical algorithm, faithful to its published form
  including the known failure modes: arc replacements and vertex moves are
  accepted without checking that the new segments stay inside the tube.
* ``edge``      - the corrected edge-based algorithm.  Candidate arcs are
  repaired by inserting vertices on blocking critical edges until every
  segment is tube-contained, and an optimized vertex position is only
  accepted if both adjacent segments pass the containment test (otherwise
  the move is bisected back toward the last feasible position).
* ``face``      - moves vertices in 2D within a unit face containing their
  critical edge, using coordinate descent of two convex 1D problems; at the
  end vertices within tau of their edge are projected onto it.

Per sweep, each vertex present at the start of the sweep is visited once in
cyclic order: it is deleted when the shortcut past it stays in the tube
(OP1), otherwise replaced by the convex chain of triangle/critical-edge
intersection points (OP2), and the surviving vertices are re-optimized on
their edges (OP3).  Structural changes take effect immediately, so later
vertices in the same sweep see updated neighbours.

Containment inside the solver is *threaded*: a simple cube-curve may touch
itself along grid edges or vertices, and the closed-cube union is connected
through those pinch seams, so a bare set-membership test would let the path
hop between tube arms and silently unwind the cycle (collapsing toward a
degenerate back-and-forth path).  Solver-internal segment checks therefore
also require every crossed cell to belong to the forward cyclic range of
curve cubes between the segment's endpoints.  This keeps the path wound
once around the tube, which is what a minimum-length polygon of the curve
means; the plain containment predicate remains available as
:func:`cubepath.tube_geometry.segment_in_tube` and is implied by the
threaded one.

Every accepted operation replaces a subpath by one of equal or shorter
length, so the recorded per-sweep lengths are non-increasing.  To keep that
exact for the corrected variants, infeasible segments of the initial path
are repaired once before the first length is recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from time import perf_counter
from typing import NamedTuple, Sequence

from .cube_model import CriticalEdge, CubeCurve
from .tube_geometry import (
    DegenerateTriangle,
    Point3,
    Tolerance,
    _cell_candidates,
    _crossing_params,
    _op3_param,
    dist,
    min_dist_sum_on_segment,
    segment_critical_intersections,
    triangle_critical_intersections,
)

ORIGINAL = "original"
EDGE_BASED = "edge"
FACE_BASED = "face"
VARIANTS = (ORIGINAL, EDGE_BASED, FACE_BASED)

BREAK_CRITERION = "criterion"
BREAK_MAX_LOOPS = "max_loops"


class NoCriticalEdges(ValueError):
    """The curve has no critical edges, so no rubberband step set exists."""


# ---------------------------------------------------------------------------
# Public data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathVertex:
    """Path vertex, either pinned to a critical edge or free in the tube."""

    position: Point3
    edge: int | None = None
    t: float | None = None


@dataclass(frozen=True)
class Polyline:
    """Closed polyline with cached total length."""

    vertices: tuple[PathVertex, ...]
    length: float

    def positions(self) -> list[Point3]:
        return [v.position for v in self.vertices]


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-10
    variant: str = EDGE_BASED
    max_loops: int = 10_000_000
    tolerance: Tolerance = field(default_factory=Tolerance)

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be > 0")
        if self.max_loops < 1:
            raise ValueError("max_loops must be >= 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")


@dataclass(frozen=True)
class RunReport:
    """Per-run record: length history, loop count and timing.

    `lengths[0]` is the length of the starting path (after feasibility
    repair for the corrected variants), `lengths[n]` the length after the
    n-th sweep.  `vertex_visits` totals the per-sweep vertex visits, i.e. the
    actual work performed.  `all_on_edges` reports, for the face variant,
    whether every final vertex landed on its critical edge.
    """

    lengths: tuple[float, ...]
    loops: int
    wall_time_ms: float
    variant: str
    epsilon: float
    broke_off_by: str
    vertex_visits: int = 0
    all_on_edges: bool | None = None

    @property
    def final_length(self) -> float:
        return self.lengths[-1]


def path_length(path: Polyline) -> float:
    """Cyclic sum of Euclidean distances between consecutive vertices."""
    pts = [v.position for v in path.vertices]
    n = len(pts)
    if n < 2:
        return 0.0
    total = 0.0
    prev = pts[-1]
    for p in pts:
        total += dist(prev, p)
        prev = p
    return total


def make_polyline(vertices: Sequence[PathVertex]) -> Polyline:
    verts = tuple(vertices)
    poly = Polyline(verts, 0.0)
    return Polyline(verts, path_length(poly))


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------

def initialize_path(curve: CubeCurve) -> Polyline:
    """Greedy endpoint initialization: one vertex per critical edge.

    The first vertex sits at t=0 of the first critical edge; each subsequent
    vertex takes the endpoint of its edge closest to the previously chosen
    vertex (ties toward t=0).  The segments of this closed path need not be
    tube-contained yet; the corrected solver variants repair them before
    recording the initial length.
    """
    edges = curve.critical_edges
    if not edges:
        raise NoCriticalEdges("curve has no critical edges")
    verts = [PathVertex(edges[0].point(0.0), 0, 0.0)]
    for e in edges[1:]:
        prev = verts[-1].position
        p0, p1 = e.point(0.0), e.point(1.0)
        if dist(p0, prev) <= dist(p1, prev):
            verts.append(PathVertex(p0, e.index, 0.0))
        else:
            verts.append(PathVertex(p1, e.index, 1.0))
    return make_polyline(verts)


# ---------------------------------------------------------------------------
# Solver internals
# ---------------------------------------------------------------------------

class _V:
    __slots__ = ("pos", "edge", "t", "uv", "h")

    def __init__(self, pos, edge=None, t=None, uv=None, h=0):
        self.pos = pos
        self.edge = edge
        self.t = t
        self.uv = uv
        self.h = h  # curve cube index anchoring the threading window


class _Face(NamedTuple):
    origin: tuple[int, int, int]
    au: int          # axis along the critical edge (u direction)
    av: int          # in-face axis orthogonal to it (v direction)
    ve: float        # v coordinate of the critical edge inside the face


def _cyclic_length(V: list[_V]) -> float:
    n = len(V)
    if n < 2:
        return 0.0
    total = 0.0
    px, py, pz = V[-1].pos
    for v in V:
        x, y, z = v.pos
        total += math.sqrt((x - px) ** 2 + (y - py) ** 2 + (z - pz) ** 2)
        px, py, pz = x, y, z
    return total


class _Solver:
    def __init__(self, curve: CubeCurve, cfg: SolverConfig):
        self.curve = curve
        self.cfg = cfg
        self.variant = cfg.variant
        self.tube = curve.tube
        self.tau = cfg.tolerance.tau
        self.tol = cfg.tolerance
        self.edges = curve.critical_edges
        self.K = len(self.edges)
        self._n = len(curve.cubes)
        self._cube_idx = {c: i for i, c in enumerate(curve.cubes)}

        # Per edge: curve indices of its three incident tube cubes, its
        # first-incidence host, and the non-tube cells mapped back to the
        # edges they carry (the lookup for blocking-edge insertion).
        blocking: dict[tuple[int, int, int], list[int]] = {}
        self._edge_cubes: list[tuple[int, ...]] = []
        self._edge_host: list[int] = []
        for e in self.edges:
            incident = []
            for cell in e.cells():
                idx = self._cube_idx.get(cell)
                if idx is not None:
                    incident.append(idx)
                else:
                    blocking.setdefault(cell, []).append(e.index)
            self._edge_cubes.append(tuple(incident))
            self._edge_host.append(min(incident) if incident else 0)
        self._blocking = {cell: sorted(idxs) for cell, idxs in blocking.items()}
        self._faces: list[_Face] | None = None
        if self.variant == FACE_BASED:
            self._faces = [self._assign_face(e) for e in self.edges]

    # -- threaded containment -------------------------------------------------
    #
    # A segment between path vertices anchored at curve cubes ha -> hb must
    # stay inside the tube AND walk the cube sequence forward: tracking the
    # cyclic offset from ha of the cube containing each sub-interval, the
    # offset may only advance by 0..3 per interval (diagonal pinch crossings
    # at shared grid edges/vertices can skip up to two cubes of a tight
    # fold), ending at the far vertex's cubes.  Large jumps would mean the
    # segment hopped onto another arm of a self-touching tube, which unwinds
    # the closed path even though the bare union of closed cubes contains it.

    _MAX_STEP = 3

    def _interval_offsets(self, x: float, y: float, z: float, ha: int, span: int) -> list[int]:
        cube_idx = self._cube_idx
        n = self._n
        tau = self.tau
        offs = []
        for cx in _cell_candidates(x, tau):
            for cy in _cell_candidates(y, tau):
                for cz in _cell_candidates(z, tau):
                    idx = cube_idx.get((cx, cy, cz))
                    if idx is not None:
                        off = (idx - ha) % n
                        if off <= span:
                            offs.append(off)
        return offs

    def _anchor_offsets(self, pos: Point3, edge: int | None, ha: int, span: int) -> set[int]:
        n = self._n
        out: set[int] = set()
        if edge is not None:
            for i in self._edge_cubes[edge]:
                off = (i - ha) % n
                if off <= span:
                    out.add(off)
        else:
            x, y, z = pos
            for cx in _cell_candidates(x, self.tau):
                for cy in _cell_candidates(y, self.tau):
                    for cz in _cell_candidates(z, self.tau):
                        idx = self._cube_idx.get((cx, cy, cz))
                        if idx is not None:
                            off = (idx - ha) % n
                            if off <= span:
                                out.add(off)
        return out

    def _seg_scan(self, pa: Point3, ha: int, ea: int | None,
                  pb: Point3, hb: int, eb: int | None):
        """Run the threaded walk.  Returns (ok, blocked_cell): ok is the
        containment verdict; blocked_cell is the first non-tube cell that
        broke the walk, or None when the failure was a threading violation
        (or there was none)."""
        n = self._n
        span = (hb - ha) % n
        step = self._MAX_STEP
        reach = self._anchor_offsets(pa, ea, ha, span)
        if not reach:
            reach = {0}
        end_set = self._anchor_offsets(pb, eb, ha, span)
        end_set.add(span)

        ax, ay, az = pa
        dx, dy, dz = pb[0] - ax, pb[1] - ay, pb[2] - az
        ts: list[float] = [1.0]
        _crossing_params(ax, dx, ts)
        _crossing_params(ay, dy, ts)
        _crossing_params(az, dz, ts)
        ts.sort()
        prev = 0.0
        for t in ts:
            if t - prev > 1e-14:
                m = (prev + t) * 0.5
                mx, my, mz = ax + m * dx, ay + m * dy, az + m * dz
                offs = self._interval_offsets(mx, my, mz, ha, span)
                if not offs:
                    return False, (math.floor(mx), math.floor(my), math.floor(mz))
                nxt = {o for o in offs if any(0 <= o - r <= step for r in reach)}
                if not nxt:
                    return False, None
                reach = nxt
            prev = t
        for r in reach:
            for d in range(step + 1):
                if r + d in end_set:
                    return True, None
        return False, None

    def _seg_ok(self, pa: Point3, ha: int, ea: int | None,
                pb: Point3, hb: int, eb: int | None) -> bool:
        return self._seg_scan(pa, ha, ea, pb, hb, eb)[0]

    def _seg_ok_vv(self, a: _V, b: _V) -> bool:
        return self._seg_scan(a.pos, a.h, a.edge, b.pos, b.h, b.edge)[0]

    def _first_blocking_edge(self, pa: Point3, ha: int, ea: int | None,
                             pb: Point3, hb: int, eb: int | None) -> int | None:
        # The first non-tube cell that broke the threaded walk names the
        # blocker, when it carries a critical edge.  Threading violations
        # have nothing to insert and repair by rejection instead.
        ok, cell = self._seg_scan(pa, ha, ea, pb, hb, eb)
        if ok or cell is None:
            return None
        found = self._blocking.get(cell)
        return found[0] if found else None

    def _host_on_edge(self, eidx: int, ha: int) -> int:
        # Anchor an inserted vertex at the incident cube of its edge that is
        # cyclically closest ahead of the segment start.
        n = self._n
        return min(self._edge_cubes[eidx], key=lambda i: (i - ha) % n)

    def _host_for_position(self, pos: Point3) -> int:
        x, y, z = pos
        for cx in _cell_candidates(x, self.tau):
            for cy in _cell_candidates(y, self.tau):
                for cz in _cell_candidates(z, self.tau):
                    idx = self._cube_idx.get((cx, cy, cz))
                    if idx is not None:
                        return idx
        return 0

    # -- faces ---------------------------------------------------------------

    def _assign_face(self, e: CriticalEdge) -> _Face:
        # A critical edge lies in exactly two unit faces shared by two tube
        # cubes (its three incident tube cubes form a path around the edge).
        # Pick the lexicographically first such face for determinism.
        au = int(e.axis)
        candidates: list[_Face] = []
        for av in range(3):
            if av == au:
                continue
            nrm = 3 - au - av
            for delta, ve in ((0, 0.0), (-1, 1.0)):
                o = list(e.origin)
                o[av] += delta
                cell_a = list(o)
                cell_b = list(o)
                cell_b[nrm] -= 1
                if tuple(cell_a) in self.tube and tuple(cell_b) in self.tube:
                    candidates.append(_Face((o[0], o[1], o[2]), au, av, ve))
        candidates.sort(key=lambda f: (f.origin, f.av))
        return candidates[0]

    @staticmethod
    def _face_point(f: _Face, u: float, w: float) -> Point3:
        p = [float(f.origin[0]), float(f.origin[1]), float(f.origin[2])]
        p[f.au] += u
        p[f.av] += w
        return (p[0], p[1], p[2])

    def _face_optimum(self, eidx: int, p: Point3, q: Point3,
                      start: tuple[float, float] | None = None) -> tuple[float, float, Point3]:
        f = self._faces[eidx]
        u, w = start if start is not None else (0.5, f.ve)
        for _ in range(200):
            s0 = self._face_point(f, 0.0, w)
            s1 = self._face_point(f, 1.0, w)
            u2, _ = min_dist_sum_on_segment(p, q, s0, s1)
            s0 = self._face_point(f, u2, 0.0)
            s1 = self._face_point(f, u2, 1.0)
            w2, _ = min_dist_sum_on_segment(p, q, s0, s1)
            done = abs(u2 - u) <= 1e-12 and abs(w2 - w) <= 1e-12
            u, w = u2, w2
            if done:
                break
        return u, w, self._face_point(f, u, w)

    def enter_faces(self, V: list[_V]) -> None:
        for v in V:
            if v.edge is not None and v.t is not None:
                f = self._faces[v.edge]
                v.uv = (v.t, f.ve)

    def exit_faces(self, V: list[_V]) -> bool:
        all_on = True
        for v in V:
            if v.uv is None:
                if v.edge is None:
                    all_on = False
                continue
            u, w = v.uv
            f = self._faces[v.edge]
            if abs(w - f.ve) <= self.tau:
                t = min(max(u, 0.0), 1.0)
                v.t = t
                v.pos = self.edges[v.edge].point(t)
            else:
                v.edge = None
                v.t = None
                all_on = False
            v.uv = None
        return all_on

    # -- repair --------------------------------------------------------------

    def _insertion_vertex(self, eidx: int, p: Point3, ha: int, q: Point3) -> _V:
        host = self._host_on_edge(eidx, ha)
        if self.variant == FACE_BASED:
            u, w, pos = self._face_optimum(eidx, p, q)
            return _V(pos, eidx, None, (u, w), host)
        e = self.edges[eidx]
        t = _op3_param(e.origin, int(e.axis), p, q)
        return _V(e.point(t), eidx, t, None, host)

    def _repair_chain(self, a: _V, pts: list[_V], b: _V) -> list[_V] | None:
        """Insert vertices on blocking critical edges until the chain
        a -> pts -> b is tube-feasible.  Returns None when no progress is
        possible; the caller then keeps its previous (feasible) state."""
        pts = list(pts)
        for _ in range(4 * self.K + 8):
            chain = [a] + pts + [b]
            bad = -1
            for s in range(len(chain) - 1):
                if not self._seg_ok_vv(chain[s], chain[s + 1]):
                    bad = s
                    break
            if bad < 0:
                return pts
            u, w = chain[bad], chain[bad + 1]
            eidx = self._first_blocking_edge(u.pos, u.h, u.edge, w.pos, w.h, w.edge)
            if eidx is None:
                return None
            nv = self._insertion_vertex(eidx, u.pos, u.h, w.pos)
            # no-progress guard: refuse to stack a duplicate of a neighbour
            for nb in (u, w):
                if nb.edge == eidx and dist(nb.pos, nv.pos) <= 1e-12:
                    return None
            if dist(nv.pos, u.pos) <= 1e-12 or dist(nv.pos, w.pos) <= 1e-12:
                return None
            pts.insert(bad, nv)
        return None

    def _center_detour(self, a: _V, b: _V) -> list[_V]:
        # Guaranteed-feasible fallback: walk cube centers along the curve
        # from a's host cube forward to b's.  Vertices are free; later sweeps
        # delete them once the path has tightened.
        cubes = self.curve.cubes
        n = self._n
        i = a.h
        end = b.h
        out: list[_V] = []
        while True:
            cx, cy, cz = cubes[i]
            out.append(_V((cx + 0.5, cy + 0.5, cz + 0.5), h=i))
            if i == end:
                break
            i = (i + 1) % n
        return out

    def repair_path(self, V: list[_V]) -> None:
        """Make every cyclic segment tube-feasible before the run starts."""
        for _ in range(8):
            changed = False
            i = 0
            while i < len(V):
                a = V[i]
                b = V[(i + 1) % len(V)]
                if self._seg_ok_vv(a, b):
                    i += 1
                    continue
                ins = self._repair_chain(a, [], b)
                if ins is None:
                    ins = self._center_detour(a, b)
                V[i + 1:i + 1] = ins
                changed = True
                i += 1 + len(ins)
            if not changed:
                return

    # -- OP2 ------------------------------------------------------------------

    def _edge_range(self, ea: int | None, eb: int | None, ev: int | None) -> list[int]:
        K = self.K
        if K == 0:
            return []
        if ea is None or eb is None:
            rng = [i for i in range(K) if i != ea and i != eb]
        elif ea == eb:
            rng = [(ea + 1 + d) % K for d in range(K - 1)]
        else:
            rng = []
            idx = (ea + 1) % K
            while idx != eb:
                rng.append(idx)
                idx = (idx + 1) % K
        if ev is not None and ev != ea and ev != eb and ev not in rng:
            rng.append(ev)
        return rng

    def _op2(self, a: _V, v: _V, b: _V, n: int) -> list[_V] | None:
        rng = self._edge_range(a.edge, b.edge, v.edge)
        if not rng:
            return None
        try:
            hits = triangle_critical_intersections(a.pos, v.pos, b.pos, self.curve, rng, self.tol)
        except DegenerateTriangle:
            hits = segment_critical_intersections(a.pos, b.pos, self.curve, rng, self.tol)
        if not hits:
            return None

        cands: list[tuple[int, float, Point3]] = []
        for e, q in hits:
            t = q[int(e.axis)] - e.origin[int(e.axis)]
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            cands.append((e.index, t, e.point(t)))

        arc = _convex_arc(a.pos, v.pos, b.pos, cands)
        if (
            len(arc) == 1
            and arc[0][0] == v.edge
            and v.t is not None
            and abs(arc[0][1] - v.t) < 1e-15
        ):
            return None

        new = [
            _V(pos, idx, t, None, self._host_on_edge(idx, a.h))
            for idx, t, pos in arc
        ]
        if self.variant == ORIGINAL:
            if not new and n < 4:
                return None
            return new

        repaired = self._repair_chain(a, new, b)
        if repaired is None:
            return None
        if not repaired and n < 4:
            return None
        new_len = 0.0
        prev = a.pos
        for w in repaired:
            new_len += dist(prev, w.pos)
            prev = w.pos
        new_len += dist(prev, b.pos)
        old_len = dist(a.pos, v.pos) + dist(v.pos, b.pos)
        if new_len > old_len + 1e-12:
            return None
        if (
            len(repaired) == 1
            and repaired[0].edge == v.edge
            and v.t is not None
            and repaired[0].t is not None
            and abs(repaired[0].t - v.t) < 1e-15
        ):
            return None
        return repaired

    # -- OP3 ------------------------------------------------------------------

    def _op3_slot(self, V: list[_V], i: int) -> None:
        v = V[i]
        n = len(V)
        if n < 2:
            return
        a = V[i - 1]
        b = V[(i + 1) % n]
        if self.variant == FACE_BASED:
            self._op3_face(v, a, b)
            return
        if v.edge is None:
            return
        e = self.edges[v.edge]
        origin, axis = e.origin, int(e.axis)
        t_new = _op3_param(origin, axis, a.pos, b.pos)
        if v.t is not None and t_new == v.t:
            return
        pos_new = e.point(t_new)
        if self.variant == ORIGINAL:
            v.t = t_new
            v.pos = pos_new
            return
        if (self._seg_ok(a.pos, a.h, a.edge, pos_new, v.h, v.edge)
                and self._seg_ok(pos_new, v.h, v.edge, b.pos, b.h, b.edge)):
            v.t = t_new
            v.pos = pos_new
            return
        # keep the best feasible position between the old one and the optimum
        t_old = v.t if v.t is not None else t_new
        lo, hi = t_old, t_new
        while abs(hi - lo) > 1e-12:
            mid = (lo + hi) * 0.5
            pm = e.point(mid)
            if (self._seg_ok(a.pos, a.h, a.edge, pm, v.h, v.edge)
                    and self._seg_ok(pm, v.h, v.edge, b.pos, b.h, b.edge)):
                lo = mid
            else:
                hi = mid
        if lo != t_old:
            v.t = lo
            v.pos = e.point(lo)

    def _op3_face(self, v: _V, a: _V, b: _V) -> None:
        if v.uv is None:
            return
        u0, w0 = v.uv
        u1, w1, pos1 = self._face_optimum(v.edge, a.pos, b.pos, v.uv)
        if u1 == u0 and w1 == w0:
            return
        if (self._seg_ok(a.pos, a.h, a.edge, pos1, v.h, v.edge)
                and self._seg_ok(pos1, v.h, v.edge, b.pos, b.h, b.edge)):
            v.uv = (u1, w1)
            v.pos = pos1
            return
        f = self._faces[v.edge]
        lo, hi = 0.0, 1.0
        while hi - lo > 1e-12:
            mid = (lo + hi) * 0.5
            um, wm = u0 + mid * (u1 - u0), w0 + mid * (w1 - w0)
            pm = self._face_point(f, um, wm)
            if (self._seg_ok(a.pos, a.h, a.edge, pm, v.h, v.edge)
                    and self._seg_ok(pm, v.h, v.edge, b.pos, b.h, b.edge)):
                lo = mid
            else:
                hi = mid
        if lo > 0.0:
            um, wm = u0 + lo * (u1 - u0), w0 + lo * (w1 - w0)
            v.uv = (um, wm)
            v.pos = self._face_point(f, um, wm)

    # -- sweep ----------------------------------------------------------------

    def sweep(self, V: list[_V]) -> int:
        """One full pass over the vertices present at its start."""
        order = list(V)
        index_of = {id(v): k for k, v in enumerate(V)}
        visits = 0
        for v in order:
            if len(V) < 2:
                break
            i = index_of.get(id(v))
            if i is None:
                continue  # removed by an earlier replacement this sweep
            visits += 1
            n = len(V)
            a = V[i - 1]
            b = V[(i + 1) % n]
            if n >= 4 and self._seg_ok_vv(a, b):
                del V[i]
                index_of = {id(w): k for k, w in enumerate(V)}
                continue
            inserted: list[_V] | None = None
            if n >= 3 and self.variant != FACE_BASED:
                arc = self._op2(a, v, b, n)
                if arc is not None:
                    V[i:i + 1] = arc
                    index_of = {id(w): k for k, w in enumerate(V)}
                    inserted = arc
            if inserted is None:
                self._op3_slot(V, i)
            else:
                for w in inserted:
                    self._op3_slot(V, index_of[id(w)])
        return visits


def _convex_arc(apos: Point3, apex: Point3, bpos: Point3,
                cands: list[tuple[int, float, Point3]]) -> list[tuple[int, float, Point3]]:
    """Convex chain from a to b over the candidate points, apex side up.

    Candidates lie in the plane of (a, apex, b).  Points strictly below the
    taut chain are pruned; collinear points are kept.  Candidates coinciding
    with an endpoint are dropped, they add nothing to the path.
    """
    kept = [c for c in cands
            if dist(c[2], apos) > 1e-12 and dist(c[2], bpos) > 1e-12]
    if len(kept) <= 1:
        return kept

    ab = (bpos[0] - apos[0], bpos[1] - apos[1], bpos[2] - apos[2])
    ab_len = math.sqrt(ab[0] ** 2 + ab[1] ** 2 + ab[2] ** 2)
    if ab_len <= 1e-12:
        return kept
    ex = (ab[0] / ab_len, ab[1] / ab_len, ab[2] / ab_len)
    av = (apex[0] - apos[0], apex[1] - apos[1], apex[2] - apos[2])
    proj = av[0] * ex[0] + av[1] * ex[1] + av[2] * ex[2]
    ey = (av[0] - proj * ex[0], av[1] - proj * ex[1], av[2] - proj * ex[2])
    ey_len = math.sqrt(ey[0] ** 2 + ey[1] ** 2 + ey[2] ** 2)
    if ey_len <= 1e-12:
        return kept
    ey = (ey[0] / ey_len, ey[1] / ey_len, ey[2] / ey_len)

    pts = []
    for k, (_, _, p) in enumerate(kept):
        rx = p[0] - apos[0]
        ry = p[1] - apos[1]
        rz = p[2] - apos[2]
        pts.append((rx * ex[0] + ry * ex[1] + rz * ex[2],
                    rx * ey[0] + ry * ey[1] + rz * ey[2], k))
    pts.sort(key=lambda r: (r[0], r[1]))

    eps = 1e-12 * (1.0 + ab_len)
    hull: list[tuple[float, float, int]] = [(0.0, 0.0, -1)]
    for r in pts + [(ab_len, 0.0, -2)]:
        while len(hull) >= 2:
            ox, oy, _ = hull[-2]
            mx, my, _ = hull[-1]
            cr = (mx - ox) * (r[1] - oy) - (my - oy) * (r[0] - ox)
            if cr > eps:  # middle point strictly below the chord: prune
                hull.pop()
            else:
                break
        hull.append(r)
    return [kept[k] for _, _, k in hull if k >= 0]


# ---------------------------------------------------------------------------
# Public solver entry points
# ---------------------------------------------------------------------------

def _solve(path: Polyline, curve: CubeCurve, cfg: SolverConfig) -> tuple[Polyline, RunReport]:
    if not path.vertices:
        raise NoCriticalEdges("cannot solve an empty path")
    sv = _Solver(curve, cfg)
    V = []
    for pv in path.vertices:
        host = sv._edge_host[pv.edge] if pv.edge is not None else sv._host_for_position(pv.position)
        V.append(_V(pv.position, pv.edge, pv.t, None, host))

    t0 = perf_counter()
    if cfg.variant != ORIGINAL:
        if cfg.variant == FACE_BASED:
            sv.enter_faces(V)
        sv.repair_path(V)

    lengths = [_cyclic_length(V)]
    visits = 0
    broke = BREAK_MAX_LOOPS
    for _ in range(cfg.max_loops):
        visits += sv.sweep(V)
        length = _cyclic_length(V)
        lengths.append(length)
        if lengths[-2] - length < cfg.epsilon:
            broke = BREAK_CRITERION
            break
    all_on = sv.exit_faces(V) if cfg.variant == FACE_BASED else None
    wall_ms = (perf_counter() - t0) * 1000.0

    poly = make_polyline([PathVertex(v.pos, v.edge, v.t) for v in V])
    report = RunReport(
        lengths=tuple(lengths),
        loops=len(lengths) - 1,
        wall_time_ms=wall_ms,
        variant=cfg.variant,
        epsilon=cfg.epsilon,
        broke_off_by=broke,
        vertex_visits=visits,
        all_on_edges=all_on,
    )
    return poly, report


def rba_loop_original(path: Polyline, curve: CubeCurve,
                      cfg: SolverConfig | None = None) -> tuple[Polyline, RunReport]:
    cfg = replace(cfg, variant=ORIGINAL) if cfg else SolverConfig(variant=ORIGINAL)
    return _solve(path, curve, cfg)


def rba_loop_edge_based(path: Polyline, curve: CubeCurve,
                        cfg: SolverConfig | None = None) -> tuple[Polyline, RunReport]:
    cfg = replace(cfg, variant=EDGE_BASED) if cfg else SolverConfig(variant=EDGE_BASED)
    return _solve(path, curve, cfg)


def rba_loop_face_based(path: Polyline, curve: CubeCurve,
                        cfg: SolverConfig | None = None) -> tuple[Polyline, RunReport]:
    cfg = replace(cfg, variant=FACE_BASED) if cfg else SolverConfig(variant=FACE_BASED)
    return _solve(path, curve, cfg)


def run_rba(path: Polyline, curve: CubeCurve, cfg: SolverConfig) -> tuple[Polyline, RunReport]:
    """Run the variant selected by the config."""
    return _solve(path, curve, cfg)


def solve_curve(curve: CubeCurve, cfg: SolverConfig | None = None) -> tuple[Polyline, RunReport]:
    """Initialize and solve in one call."""
    cfg = cfg or SolverConfig()
    return _solve(initialize_path(curve), curve, cfg)


def simplify_collinear(path: Polyline, eps: float = 1e-9) -> Polyline:
    """Reporting helper: drop vertices collinear with their neighbours.

    Solvers keep collinear (redundant) vertices; this optional pass removes
    any vertex lying within `eps` of the segment between its neighbours.
    """
    verts = list(path.vertices)
    changed = True
    while changed and len(verts) > 3:
        changed = False
        for i in range(len(verts)):
            a = verts[i - 1].position
            v = verts[i].position
            b = verts[(i + 1) % len(verts)].position
            d_direct = dist(a, b)
            detour = dist(a, v) + dist(v, b)
            if detour - d_direct <= eps:
                del verts[i]
                changed = True
                break
    return make_polyline(verts)


# ---------------------------------------------------------------------------
# Path file format
# ---------------------------------------------------------------------------
# Header:  esp variant=<v> epsilon=<e> length=<L> loops=<N>
# Vertex:  vertex <x> <y> <z> [edge=<index> t=<t>]
# Numbers use 17 significant digits so files round-trip exactly.

def path_to_text(path: Polyline, variant: str, epsilon: float, loops: int) -> str:
    lines = [
        f"esp variant={variant} epsilon={epsilon:.17g} "
        f"length={path.length:.17g} loops={loops}"
    ]
    for v in path.vertices:
        x, y, z = v.position
        line = f"vertex {x:.17g} {y:.17g} {z:.17g}"
        if v.edge is not None and v.t is not None:
            line += f" edge={v.edge} t={v.t:.17g}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def parse_path_text(text: str) -> tuple[Polyline, dict[str, str]]:
    header: dict[str, str] = {}
    verts: list[PathVertex] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "esp":
            for tok in tokens[1:]:
                key, _, val = tok.partition("=")
                header[key] = val
        elif tokens[0] == "vertex":
            x, y, z = (float(t) for t in tokens[1:4])
            edge = None
            t = None
            for tok in tokens[4:]:
                key, _, val = tok.partition("=")
                if key == "edge":
                    edge = int(val)
                elif key == "t":
                    t = float(val)
            verts.append(PathVertex((x, y, z), edge, t))
        else:
            raise ValueError(f"line {lineno}: unknown directive {tokens[0]!r}")
    return make_polyline(verts), header


def save_path_file(filename, path: Polyline, variant: str, epsilon: float, loops: int) -> None:
    with open(filename, "w", encoding="utf-8") as fh:
        fh.write(path_to_text(path, variant, epsilon, loops))
