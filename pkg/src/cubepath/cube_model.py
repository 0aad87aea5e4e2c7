"""Grid-level model of simple cube-curves.

A simple cube-curve is a closed cyclic chain of unit grid cubes in which
consecutive cubes share a face and no cube is face-adjacent to any curve cube
other than its two cyclic neighbours.  The union of the closed cubes is the
"tube", the free space in which shortest closed paths are computed.  Grid
edges touched by exactly three cubes of the curve ("critical edges") are the
only places such a path can bend, so they drive everything downstream:
solver initialization, vertex optimization and the graph oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from itertools import permutations, product
from typing import Iterable, NamedTuple, Sequence

Cube = tuple[int, int, int]
GridPoint = tuple[int, int, int]


class Axis(IntEnum):
    X = 0
    Y = 1
    Z = 2


END_ANGLE = "end"
MIDDLE_ANGLE = "middle"


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class CurveError(ValueError):
    """Base class for invalid cube-curve input."""


class TooShort(CurveError):
    pass


class NotClosed(CurveError):
    pass


class DuplicateCube(CurveError):
    pass


class NotFaceAdjacent(CurveError):
    """Consecutive cubes in the sequence do not share a face."""


class ChordAdjacency(CurveError):
    """A cube is face-adjacent to a curve cube that is not a cyclic neighbour."""


class CurveParseError(CurveError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class PathNotOnCurve(ValueError):
    """A pinned path vertex references a critical edge the curve does not have."""


# ---------------------------------------------------------------------------
# Core types
# ---------------------------------------------------------------------------

class CriticalEdge(NamedTuple):
    """Unit grid edge incident with exactly three cubes of the curve.

    The edge runs from `origin` one unit along `axis`; `index` is its position
    in the cyclic order of first incidence along the cube sequence.
    """

    origin: GridPoint
    axis: Axis
    index: int

    def point(self, t: float) -> tuple[float, float, float]:
        ox, oy, oz = self.origin
        a = self.axis
        if a == 0:
            return (ox + t, float(oy), float(oz))
        if a == 1:
            return (float(ox), oy + t, float(oz))
        return (float(ox), float(oy), oz + t)

    @property
    def endpoints(self) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
        return self.point(0.0), self.point(1.0)

    def cells(self) -> tuple[Cube, Cube, Cube, Cube]:
        """The four grid cells whose closure contains this edge."""
        ox, oy, oz = self.origin
        a = self.axis
        if a == 0:
            return ((ox, oy - 1, oz - 1), (ox, oy, oz - 1), (ox, oy - 1, oz), (ox, oy, oz))
        if a == 1:
            return ((ox - 1, oy, oz - 1), (ox, oy, oz - 1), (ox - 1, oy, oz), (ox, oy, oz))
        return ((ox - 1, oy - 1, oz), (ox, oy - 1, oz), (ox - 1, oy, oz), (ox, oy, oz))


@dataclass(frozen=True)
class CubeCurve:
    """Validated simple cube-curve with derived tube and critical edges.

    Construct through :func:`validate_curve`; the constructor performs no
    checking of its own.
    """

    cubes: tuple[Cube, ...]
    tube: frozenset[Cube]
    critical_edges: tuple[CriticalEdge, ...]

    def __len__(self) -> int:
        return len(self.cubes)

    def bounding_box(self) -> tuple[Cube, Cube]:
        xs = [c[0] for c in self.cubes]
        ys = [c[1] for c in self.cubes]
        zs = [c[2] for c in self.cubes]
        return (min(xs), min(ys), min(zs)), (max(xs), max(ys), max(zs))


@dataclass(frozen=True)
class CurveClassification:
    """Angle structure of the critical edges of a curve.

    `angle_triples` lists each run of three consecutive critical edges with
    pairwise orthogonal axes, tagged END_ANGLE when the outer two edges are
    coplanar and MIDDLE_ANGLE otherwise.  `is_first_class` is only known
    relative to a solved path (see :func:`classify_first_class`), so it stays
    None here.
    """

    angle_triples: tuple[tuple[tuple[int, int, int], str], ...]
    has_end_angle: bool
    is_first_class: bool | None = None

    @property
    def end_angle_count(self) -> int:
        return sum(1 for _, kind in self.angle_triples if kind == END_ANGLE)

    @property
    def middle_angle_count(self) -> int:
        return sum(1 for _, kind in self.angle_triples if kind == MIDDLE_ANGLE)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

_DIRS = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))


def face_adjacent(a: Cube, b: Cube) -> bool:
    """True iff the cubes differ by exactly 1 in exactly one coordinate."""
    dx = abs(a[0] - b[0])
    dy = abs(a[1] - b[1])
    dz = abs(a[2] - b[2])
    return dx + dy + dz == 1


def validate_curve(cubes: Iterable[Sequence[int]]) -> CubeCurve:
    """Validate a cyclic cube sequence and derive tube plus critical edges.

    Raises TooShort, DuplicateCube, NotFaceAdjacent, NotClosed or
    ChordAdjacency when the sequence is not a simple cube-curve.  Edge and
    vertex adjacency between non-neighbours is allowed; only face adjacency
    counts as a chord.
    """
    seq: list[Cube] = []
    for cube in cubes:
        x, y, z = cube
        seq.append((int(x), int(y), int(z)))
    n = len(seq)
    if n < 4:
        raise TooShort(f"curve needs at least 4 cubes, got {n}")

    tube = frozenset(seq)
    if len(tube) != n:
        seen: set[Cube] = set()
        for c in seq:
            if c in seen:
                raise DuplicateCube(f"cube {c} occurs more than once")
            seen.add(c)

    for i in range(n):
        a, b = seq[i], seq[(i + 1) % n]
        if not face_adjacent(a, b):
            if i == n - 1:
                raise NotClosed(f"first and last cubes {b} / {a} are not face-adjacent")
            raise NotFaceAdjacent(f"cubes {a} and {b} at positions {i},{i + 1} are not face-adjacent")

    index = {c: i for i, c in enumerate(seq)}
    for i, c in enumerate(seq):
        for dx, dy, dz in _DIRS:
            j = index.get((c[0] + dx, c[1] + dy, c[2] + dz))
            if j is None:
                continue
            if j != (i + 1) % n and j != (i - 1) % n:
                raise ChordAdjacency(
                    f"cube {c} is face-adjacent to non-neighbour {seq[j]} (positions {i},{j})"
                )

    edges = _collect_critical_edges(seq, tube)
    return CubeCurve(tuple(seq), tube, tuple(edges))


def _cube_edge_keys(c: Cube) -> list[tuple[GridPoint, int]]:
    """The 12 grid edges of a cube as (origin, axis) keys."""
    x, y, z = c
    keys: list[tuple[GridPoint, int]] = []
    for dy in (0, 1):
        for dz in (0, 1):
            keys.append(((x, y + dy, z + dz), 0))
    for dx in (0, 1):
        for dz in (0, 1):
            keys.append(((x + dx, y, z + dz), 1))
    for dx in (0, 1):
        for dy in (0, 1):
            keys.append(((x + dx, y + dy, z), 2))
    return keys


def _collect_critical_edges(seq: list[Cube], tube: frozenset[Cube]) -> list[CriticalEdge]:
    counts: dict[tuple[GridPoint, int], int] = {}
    for c in seq:
        for key in _cube_edge_keys(c):
            counts[key] = counts.get(key, 0) + 1

    critical = {key for key, cnt in counts.items() if cnt == 3}
    ordered: list[CriticalEdge] = []
    seen: set[tuple[GridPoint, int]] = set()
    for c in seq:
        local = [k for k in _cube_edge_keys(c) if k in critical and k not in seen]
        local.sort()
        for origin, axis in local:
            seen.add((origin, axis))
            ordered.append(CriticalEdge(origin, Axis(axis), len(ordered)))
    return ordered


def critical_edges(curve: CubeCurve) -> list[CriticalEdge]:
    """Critical edges of the curve in cyclic first-incidence order."""
    return list(curve.critical_edges)


# ---------------------------------------------------------------------------
# Angle classification
# ---------------------------------------------------------------------------

def angle_kind(e1: CriticalEdge, e2: CriticalEdge, e3: CriticalEdge) -> str | None:
    """Classify a critical-edge triple as END_ANGLE, MIDDLE_ANGLE or None.

    A triple qualifies as an angle only when the three axes are pairwise
    orthogonal (all distinct).  The outer edges e1 and e3, being orthogonal
    axis segments, are coplanar exactly when they agree on the coordinate of
    the remaining third axis.
    """
    a1, a2, a3 = int(e1.axis), int(e2.axis), int(e3.axis)
    if a1 == a2 or a2 == a3 or a1 == a3:
        return None
    third = 3 - a1 - a3
    if e1.origin[third] == e3.origin[third]:
        return END_ANGLE
    return MIDDLE_ANGLE


def classify_angles(curve: CubeCurve) -> CurveClassification:
    """Label every consecutive critical-edge triple that forms an angle."""
    edges = curve.critical_edges
    k = len(edges)
    triples: list[tuple[tuple[int, int, int], str]] = []
    if k >= 3:
        for i in range(k):
            j, l = (i + 1) % k, (i + 2) % k
            kind = angle_kind(edges[i], edges[j], edges[l])
            if kind is not None:
                triples.append(((i, j, l), kind))
    has_end = any(kind == END_ANGLE for _, kind in triples)
    return CurveClassification(tuple(triples), has_end)


def classify_first_class(curve: CubeCurve, path) -> bool:
    """True iff every critical edge hosts exactly one vertex of `path`.

    The verdict is relative to the supplied (computed) path, not ground
    truth: the exact shortest path is not computable, so first-class status
    can only ever be certified with respect to an approximation.  `path` is
    any object with a `vertices` iterable of objects carrying an `edge`
    attribute (critical edge index or None for free vertices).
    """
    k = len(curve.critical_edges)
    counts = [0] * k
    for v in path.vertices:
        e = v.edge
        if e is None:
            continue
        if not 0 <= e < k:
            raise PathNotOnCurve(f"vertex pinned to edge {e}, curve has {k} critical edges")
        counts[e] += 1
    return all(c == 1 for c in counts)


# ---------------------------------------------------------------------------
# Grid symmetries (used by property tests and fixtures)
# ---------------------------------------------------------------------------

def signed_axis_permutations() -> list[tuple[tuple[int, int, int], tuple[int, int, int]]]:
    """All 48 signed axis permutations as (perm, signs) pairs.

    The induced point map is p -> (signs[i] * p[perm[i]] for i in 0..2).
    """
    return [
        (p, s)
        for p in permutations((0, 1, 2))
        for s in product((1, -1), repeat=3)
    ]


def transform_point(p, perm, signs, offset=(0, 0, 0)):
    return tuple(signs[i] * p[perm[i]] + offset[i] for i in range(3))


def transform_cube(c: Cube, perm, signs, offset=(0, 0, 0)) -> Cube:
    # A cell [c, c+1] maps to [-c-1, -c] under negation, so negative signs
    # shift the cell index by one.
    return tuple(
        signs[i] * c[perm[i]] + (-1 if signs[i] < 0 else 0) + offset[i] for i in range(3)
    )


def transform_edge(origin: GridPoint, axis: Axis, perm, signs, offset=(0, 0, 0)) -> tuple[GridPoint, Axis]:
    new_axis = perm.index(int(axis))
    o = list(transform_point(origin, perm, signs, offset))
    if signs[new_axis] < 0:
        o[new_axis] -= 1
    return (o[0], o[1], o[2]), Axis(new_axis)


def transform_curve(curve: CubeCurve, perm, signs, offset=(0, 0, 0)) -> CubeCurve:
    return validate_curve([transform_cube(c, perm, signs, offset) for c in curve.cubes])


# ---------------------------------------------------------------------------
# Curve file format
# ---------------------------------------------------------------------------
# One line per cube in cyclic order:  cube <x> <y> <z>
# '#' starts a comment; blank lines are ignored; any other directive is an
# error.  Writers emit exactly this form so files round-trip byte-identically.

def parse_curve_text(text: str) -> list[Cube]:
    cubes: list[Cube] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] != "cube":
            raise CurveParseError(lineno, f"unknown directive {tokens[0]!r}")
        if len(tokens) != 4:
            raise CurveParseError(lineno, f"expected 'cube x y z', got {len(tokens) - 1} values")
        try:
            x, y, z = (int(tok) for tok in tokens[1:])
        except ValueError:
            raise CurveParseError(lineno, f"non-integer coordinate in {line!r}") from None
        cubes.append((x, y, z))
    return cubes


def curve_to_text(curve: CubeCurve) -> str:
    return "".join(f"cube {x} {y} {z}\n" for x, y, z in curve.cubes)


def load_curve(path) -> CubeCurve:
    with open(path, "r", encoding="utf-8") as fh:
        return validate_curve(parse_curve_text(fh.read()))


def save_curve(path, curve: CubeCurve) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(curve_to_text(curve))
