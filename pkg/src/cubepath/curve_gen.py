"""Random simple cube-curve generation.

A curve is grown as a self-avoiding random walk of face-adjacent cubes (each
new cube may touch only its predecessor, so the no-chord property holds by
construction), then closed by a deterministic return path of at most three
axis-aligned straight runs ending face-adjacent to the start cube.  The walk
stops once walk length plus the L1 return distance reaches the requested
size, which keeps the closing runs long and the final cube count near the
target.  When the direct return collides with the walk, cubes are popped off
the walk end and the closing retried; a whole attempt is restarted with
fresh randomness when that fails too.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations

from .cube_model import Cube, CubeCurve, CurveError, face_adjacent, validate_curve

_DIRS = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))


class GenerationFailed(RuntimeError):
    def __init__(self, seed: int, attempts: int):
        super().__init__(
            f"no valid curve after {attempts} attempts (seed {seed})"
        )
        self.seed = seed
        self.attempts = attempts


@dataclass(frozen=True)
class GenConfig:
    target_cubes: int
    seed: int = 0
    max_attempts: int = 10_000

    def __post_init__(self):
        if self.target_cubes < 8:
            raise ValueError(f"target_cubes must be >= 8, got {self.target_cubes}")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


def _neighbours(c: Cube):
    x, y, z = c
    return (
        (x + 1, y, z), (x - 1, y, z),
        (x, y + 1, z), (x, y - 1, z),
        (x, y, z + 1), (x, y, z - 1),
    )


def _walk(rng: random.Random, target: int) -> tuple[list[Cube], set[Cube]] | None:
    start: Cube = (0, 0, 0)
    cubes = [start]
    occupied = {start}
    while True:
        cur = cubes[-1]
        l1 = abs(cur[0]) + abs(cur[1]) + abs(cur[2])
        # closing adds about l1 - 1 cubes, so stop once the sum reaches target
        if len(cubes) >= 4 and len(cubes) + l1 - 1 >= target - 1:
            return cubes, occupied
        if len(cubes) > 2 * target:
            return None
        options = []
        for nxt in _neighbours(cur):
            if nxt in occupied:
                continue
            touching = sum(1 for nb in _neighbours(nxt) if nb in occupied)
            if touching == 1:  # only the current end cube
                options.append(nxt)
        if not options:
            return None  # walk trapped itself
        nxt = options[rng.randrange(len(options))]
        cubes.append(nxt)
        occupied.add(nxt)


def _run_positions(end: Cube, delta: tuple[int, int, int], order) -> list[Cube]:
    positions: list[Cube] = []
    cur = list(end)
    for pi, axis in enumerate(order):
        d = delta[axis]
        step = 1 if d > 0 else -1
        run = abs(d) - (1 if pi == len(order) - 1 else 0)
        for _ in range(run):
            cur[axis] += step
            positions.append((cur[0], cur[1], cur[2]))
    return positions


def _try_close(cubes: list[Cube], occupied: set[Cube]) -> list[Cube] | None:
    """Closing path of at most three straight runs from the walk end back to
    a cube face-adjacent to the start, preserving curve simplicity."""
    start = cubes[0]
    end = cubes[-1]
    delta = (start[0] - end[0], start[1] - end[1], start[2] - end[2])
    nonzero = [i for i in range(3) if delta[i] != 0]
    if not nonzero:
        return None
    for order in permutations(nonzero):
        positions = _run_positions(end, delta, order)
        if not positions:
            if face_adjacent(end, start):
                return []
            continue
        ok = True
        placed: set[Cube] = set()
        prev = end
        last = positions[-1]
        for idx, c in enumerate(positions):
            if c in occupied or c in placed:
                ok = False
                break
            touching = {nb for nb in _neighbours(c) if nb in occupied or nb in placed}
            expect = {prev, start} if idx == len(positions) - 1 else {prev}
            if touching != expect:
                ok = False
                break
            placed.add(c)
            prev = c
        if ok and face_adjacent(last, start):
            return positions
    return None


def generate_curve(cfg: GenConfig) -> CubeCurve:
    """Generate a validated simple cube-curve, deterministic in the seed.

    The final cube count lands within 20 percent of `cfg.target_cubes`;
    raises GenerationFailed when `cfg.max_attempts` attempts all fail.
    """
    rng = random.Random(cfg.seed)
    target = cfg.target_cubes
    lo = int(0.8 * target)
    hi = int(1.2 * target) + 1
    for _ in range(cfg.max_attempts):
        grown = _walk(rng, target)
        if grown is None:
            continue
        cubes, occupied = grown
        while len(cubes) >= 4:
            closing = _try_close(cubes, occupied)
            if closing is not None and lo <= len(cubes) + len(closing) <= hi:
                try:
                    return validate_curve(cubes + closing)
                except CurveError:
                    pass  # fall through to popping
            occupied.discard(cubes.pop())
    raise GenerationFailed(cfg.seed, cfg.max_attempts)
