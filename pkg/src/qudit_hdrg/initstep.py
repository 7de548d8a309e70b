"""Initialization pre-decoder for enhanced HDRG.

Before clustering, sweep the defects in (t, x, y) order and look for short
unit-step paths whose total charge (every cell on the path, endpoints
included) vanishes mod d. The first such path found at a defect is fused
along its length. Levels are ordered by path length, and within one length by
decreasing degeneracy:

    level 1  one step                       6 endpoints x 1 path  =  6
    level 2  two steps on two axes (D=2)    12 endpoints x 2 paths = 24
    level 3  two steps on one axis (D=1)    6 endpoints x 1 path  =  6
    level 4  one step on each axis (D=6)    8 endpoints x 6 paths = 48

Paths never end on a physical or time boundary.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from .history import ChangesHistory
from .lattice import CodeGeometry, path_corrections

# search order: axis t, x, y; + before -
_UNIT = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))
_AXES = ((0, 1), (0, 2), (1, 2))


def degeneracy(h: int, v: int, z: int) -> int:
    """Number of monotone lattice paths with h, v and z unit steps on three axes."""
    if min(h, v, z) < 0:
        raise ValueError("step counts must be non-negative")
    if h == v == z == 0:
        raise ValueError("a path needs at least one step")
    return math.factorial(h + v + z) // (math.factorial(h) * math.factorial(v) * math.factorial(z))


@dataclass(frozen=True)
class InitLevel:
    index: int
    # each path is a tuple of unit steps (dt, dx, dy), in search order
    paths: tuple

    @property
    def endpoints(self) -> list[tuple[int, int, int]]:
        seen = {}
        for path in self.paths:
            seen.setdefault(tuple(map(sum, zip(*path))), None)
        return list(seen)

    @property
    def paths_per_defect(self) -> int:
        return len(self.paths)


def _unit(axis: int, sign: int):
    step = [0, 0, 0]
    step[axis] = sign
    return tuple(step)


@lru_cache(maxsize=None)
def level_catalog(i: int) -> InitLevel:
    if i == 1:
        paths = tuple((u,) for u in _UNIT)
    elif i == 2:
        paths = []
        for a, b in _AXES:
            for sa, sb in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                ua, ub = _unit(a, sa), _unit(b, sb)
                paths += [(ua, ub), (ub, ua)]
        paths = tuple(paths)
    elif i == 3:
        paths = tuple((u, u) for u in _UNIT)
    elif i == 4:
        paths = []
        for st, sx, sy in itertools.product((1, -1), repeat=3):
            units = (_unit(0, st), _unit(1, sx), _unit(2, sy))
            paths += list(itertools.permutations(units))
        paths = tuple(paths)
    else:
        raise ValueError(f"unsupported initialization level {i}; levels 1-4 exist")
    return InitLevel(i, paths)


def _cells(site, path):
    t, x, y = site
    cells = [site]
    for dt, dx, dy in path:
        t, x, y = t + dt, x + dx, y + dy
        cells.append((t, x, y))
    return cells


def enumerate_paths(site, level: int, T: int, L: int) -> list[list[tuple[int, int, int]]]:
    """Cell sequences (starting at ``site``) of the level's paths that stay on the grid."""
    out = []
    for path in level_catalog(level).paths:
        cells = _cells(site, path)
        if all(1 <= t <= T and 1 <= x <= L and 1 <= y <= L - 1 for t, x, y in cells):
            out.append(cells)
    return out


def path_charge(cells, charges: dict, d: int) -> int:
    return sum(charges.get(c, 0) for c in cells) % d


def _fuse_along(cells, charges: dict, d: int, g: CodeGeometry, out: list) -> None:
    carried = 0
    for a, b in zip(cells, cells[1:]):
        carried = (carried + charges.pop(a, 0)) % d
        if carried and a[0] == b[0]:
            # spatial step inside round a[0]
            axis = "x" if a[1] != b[1] else "y"
            step = (b[1] - a[1]) if axis == "x" else (b[2] - a[2])
            out.extend(path_corrections([(axis, step, a[0], a[1], a[2])], carried, g))
    charges.pop(cells[-1], None)


def initialize(changes: ChangesHistory, depth: int, g: CodeGeometry, stats: dict | None = None):
    """Run initialization levels 1..depth.

    Returns ``(corrections, reduced)`` where ``corrections`` is a list of
    ``(t, edge, exponent)`` and ``reduced`` is the remaining S'.
    """
    if not 0 <= depth <= 4:
        raise ValueError("initialization depth must be between 0 and 4")
    d, T, L = changes.d, changes.T, changes.L
    charges = dict(changes.charges)
    corrections: list[tuple[int, int, int]] = []
    for level in range(1, depth + 1):
        paths = level_catalog(level).paths
        annihilated = 0
        for site in sorted(charges):
            if not charges.get(site):
                continue  # already fused earlier in this sweep
            for path in paths:
                cells = _cells(site, path)
                end = cells[-1]
                # a charged endpoint is on the grid, and so is every cell
                # between it and the start (the grid is a box)
                if not charges.get(end):
                    continue
                if path_charge(cells, charges, d) == 0:
                    _fuse_along(cells, charges, d, g, corrections)
                    annihilated += 1
                    break
        if stats is not None:
            stats[level] = annihilated
    return corrections, ChangesHistory(T, L, d, charges)
