"""Graph-search approximation of the shortest closed path in a tube.

Each critical edge is subdivided into m uniformly spaced sample points; the
samples of consecutive critical edges are connected whenever the straight
segment between them stays inside the tube.  A layered dynamic program then
finds the minimum-length closed walk visiting exactly one sample per
critical edge in cyclic order.  The result is an independent check on the
rubberband solvers and, fed back in as a start path, a first-class seed
(one vertex on every critical edge).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cube_model import CubeCurve
from .rubberband import (
    PathVertex,
    Polyline,
    RunReport,
    SolverConfig,
    make_polyline,
    run_rba,
)
from .tube_geometry import DEFAULT_TOL, Point3, Tolerance, _segment_in, dist

INF = float("inf")


class TooFewCriticalEdges(ValueError):
    pass


class Disconnected(ValueError):
    """No tube-visible sample pair between two consecutive critical edges."""

    def __init__(self, layer_pair: tuple[int, int]):
        super().__init__(
            f"no arc between critical edges {layer_pair[0]} and {layer_pair[1]}"
        )
        self.layer_pair = layer_pair


@dataclass(frozen=True)
class SubdivisionGraph:
    """Weighted visibility graph over critical-edge sample points.

    Nodes are numbered edge-major: node ``e * m + k`` is sample ``k`` of
    critical edge ``e``.  ``layer_weights[j][u][v]`` is the Euclidean
    distance between sample u of edge j and sample v of edge (j+1) mod k,
    or inf when the connecting segment leaves the tube.  ``arcs`` lists the
    existing arcs as (node_i, node_j, weight); with ``full`` set it covers
    every tube-visible cross-edge pair, otherwise only consecutive layers
    (the only arcs a one-vertex-per-edge cycle can use).
    """

    m: int
    edge_count: int
    nodes: tuple[tuple[int, int, Point3], ...]
    arcs: tuple[tuple[int, int, float], ...]
    layer_weights: tuple[tuple[tuple[float, ...], ...], ...]
    full: bool = False

    def node_position(self, node: int) -> Point3:
        return self.nodes[node][2]


def _sample_params(m: int) -> list[float]:
    if m == 1:
        return [0.5]
    return [k / (m - 1) for k in range(m)]


def build_graph(curve: CubeCurve, m: int, tol: Tolerance = DEFAULT_TOL,
                full: bool = False) -> SubdivisionGraph:
    """Subdivide critical edges into m samples and connect tube-visible pairs."""
    if m < 1:
        raise ValueError("m must be >= 1")
    edges = curve.critical_edges
    k = len(edges)
    if k < 2:
        raise TooFewCriticalEdges(f"need at least 2 critical edges, curve has {k}")

    params = _sample_params(m)
    positions: list[list[Point3]] = [[e.point(t) for t in params] for e in edges]
    nodes = tuple(
        (e, s, positions[e][s]) for e in range(k) for s in range(m)
    )

    tube, tau = curve.tube, tol.tau

    def visible(p: Point3, q: Point3) -> bool:
        return _segment_in(p[0], p[1], p[2], q[0], q[1], q[2], tube, tau)

    matrices: list[tuple[tuple[float, ...], ...]] = []
    arcs: list[tuple[int, int, float]] = []
    for j in range(k):
        nj = (j + 1) % k
        rows = []
        for u, pu in enumerate(positions[j]):
            row = []
            for v, pv in enumerate(positions[nj]):
                if visible(pu, pv):
                    w = dist(pu, pv)
                    arcs.append((j * m + u, nj * m + v, w))
                else:
                    w = INF
                row.append(w)
            rows.append(tuple(row))
        matrices.append(tuple(rows))

    if full:
        arc_seen = {(min(i, j), max(i, j)) for i, j, _ in arcs}
        for e1 in range(k):
            for e2 in range(e1 + 1, k):
                if e2 == (e1 + 1) % k or e1 == (e2 + 1) % k:
                    continue
                for u, pu in enumerate(positions[e1]):
                    for v, pv in enumerate(positions[e2]):
                        key = (e1 * m + u, e2 * m + v)
                        if key not in arc_seen and visible(pu, pv):
                            arcs.append((key[0], key[1], dist(pu, pv)))

    return SubdivisionGraph(
        m=m,
        edge_count=k,
        nodes=nodes,
        arcs=tuple(arcs),
        layer_weights=tuple(matrices),
        full=full,
    )


def shortest_cycle(graph: SubdivisionGraph) -> tuple[Polyline, float]:
    """Minimum-length cycle visiting one sample per critical edge in order.

    For each start sample on edge 0 a forward DP sweeps through the layers;
    the best closing total over all starts wins.  Raises Disconnected when
    some consecutive layer pair has no arc at all.
    """
    k, m = graph.edge_count, graph.m
    W = graph.layer_weights
    for j in range(k):
        if all(w == INF for row in W[j] for w in row):
            raise Disconnected((j, (j + 1) % k))

    params = _sample_params(m)
    best_total = INF
    best_nodes: list[int] | None = None

    for s in range(m):
        dist_prev = list(W[0][s])
        parents: list[list[int]] = [[s] * m]
        dead = all(d == INF for d in dist_prev)
        for j in range(1, k - 1):
            wj = W[j]
            dist_next = [INF] * m
            par = [0] * m
            for u in range(m):
                du = dist_prev[u]
                if du == INF:
                    continue
                row = wj[u]
                for v in range(m):
                    cand = du + row[v]
                    if cand < dist_next[v]:
                        dist_next[v] = cand
                        par[v] = u
            parents.append(par)
            dist_prev = dist_next
            if all(d == INF for d in dist_prev):
                dead = True
                break
        if dead and k > 2:
            continue
        closing = W[k - 1]
        for v in range(m):
            dv = dist_prev[v]
            if dv == INF:
                continue
            total = dv + closing[v][s]
            if total < best_total:
                best_total = total
                chain = [v]
                for j in range(k - 2, 0, -1):
                    chain.append(parents[j][chain[-1]])
                chain.append(s)
                chain.reverse()
                best_nodes = chain

    if best_nodes is None:
        raise Disconnected((k - 1, 0))

    verts = [
        PathVertex(graph.nodes[e * m + s_idx][2], e, params[s_idx])
        for e, s_idx in enumerate(best_nodes)
    ]
    poly = make_polyline(verts)
    return poly, poly.length


def oracle_then_rba(curve: CubeCurve, m: int, cfg: SolverConfig,
                    tol: Tolerance = DEFAULT_TOL) -> tuple[Polyline, RunReport]:
    """Seed the selected rubberband variant with the oracle cycle.

    The report's initial length is the cycle length, so both the seed and
    the final value are visible in one record.
    """
    graph = build_graph(curve, m, tol)
    seed, _ = shortest_cycle(graph)
    return run_rba(seed, curve, cfg)


def graph_to_text(graph: SubdivisionGraph) -> str:
    """Dump format: 'node <edge> <k> <x> <y> <z>' and 'arc <i> <j> <w>' lines."""
    lines = []
    for e, s, (x, y, z) in graph.nodes:
        lines.append(f"node {e} {s} {x:.17g} {y:.17g} {z:.17g}")
    for i, j, w in graph.arcs:
        lines.append(f"arc {i} {j} {w:.17g}")
    return "\n".join(lines) + "\n"
