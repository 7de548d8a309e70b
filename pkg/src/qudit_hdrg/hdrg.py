"""Hard-decision renormalization-group (HDRG) decoder on the spacetime S' grid.

At level l the defects are split into delta-connected clusters with
delta = 2**l under the Manhattan metric. Neutral clusters (total charge 0 mod d)
are fused to a single point; charged clusters within delta of a smooth
boundary (south y=0, north y=L, or the future time boundary t=T+1) are fused
and then pushed into that boundary. Everything fused at a level is committed;
charged clusters wait for the next level.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from .history import ChangesHistory, Defect
from .lattice import NORTH, SOUTH, TIME, CodeGeometry, path_corrections, transport_path


class Dims(NamedTuple):
    """Spacetime extent seen by the decoder."""

    T: int
    L: int
    time_boundary: bool = True


class Kind(enum.Enum):
    NEUTRAL = "neutral"
    BOUNDARY_NEUTRAL = "boundary-neutral"
    CHARGED = "charged"


class UnionFind:
    """Disjoint sets over ``range(n)`` with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return list(out.values())


def manhattan(a, b) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) + abs(a[2] - b[2])


def boundary_distances(site, dims: Dims) -> list[tuple[int, str]]:
    """``(distance, boundary)`` to each smooth boundary, in tie-break order."""
    t, y = site[0], site[2]
    out = [(y, SOUTH), (dims.L - y, NORTH)]
    if dims.time_boundary:
        out.append((dims.T + 1 - t, TIME))
    return out


_ORDER = {SOUTH: 0, NORTH: 1, TIME: 2}


def nearest_boundary(site, dims: Dims) -> tuple[int, str]:
    # min() keeps the first of equal distances: south, north, time
    return min(boundary_distances(site, dims), key=lambda item: item[0])


@dataclass
class Cluster:
    """A delta-connected set of defects with its total charge.

    The nearest-boundary record (``boundary``, ``boundary_distance`` and the
    ``anchor`` defect realising it) is worked out on first use.
    """

    defects: list
    charge: int
    dims: Dims

    @classmethod
    def from_defects(cls, defects, d: int, dims: Dims) -> "Cluster":
        defects = sorted(defects)
        return cls(defects, sum(df.charge for df in defects) % d, dims)

    @cached_property
    def _nearest(self):
        # ties go south, north, time, then to the smallest defect
        return min((dist, _ORDER[side], df, side)
                   for df in self.defects for dist, side in boundary_distances(df, self.dims))

    @property
    def boundary(self) -> str:
        return self._nearest[3]

    @property
    def boundary_distance(self) -> int:
        return self._nearest[0]

    @property
    def anchor(self) -> Defect:
        return self._nearest[2]


def cluster_defects(defects, delta: int) -> list[list[Defect]]:
    """Partition defects into maximal delta-connected components.

    Components come back sorted internally and ordered by their smallest defect.
    """
    if delta < 1:
        raise ValueError("connectivity distance must be >= 1")
    defects = list(defects)
    n = len(defects)
    if n == 0:
        return []
    uf = UnionFind(n)
    if delta == 1:
        index = {df[:3]: i for i, df in enumerate(defects)}
        for i, (t, x, y, _) in enumerate(defects):
            # forward neighbours suffice: each adjacent pair is seen once
            for site in ((t + 1, x, y), (t, x + 1, y), (t, x, y + 1)):
                j = index.get(site)
                if j is not None:
                    uf.union(i, j)
    elif n > 1:
        coords = np.array([df[:3] for df in defects], dtype=np.float64)
        pairs = cKDTree(coords).query_pairs(r=delta + 0.5, p=1, output_type="ndarray")
        for i, j in pairs.tolist():
            uf.union(i, j)
    groups = [sorted(defects[i] for i in grp) for grp in uf.groups()]
    groups.sort(key=lambda grp: grp[0])
    return groups


def classify_cluster(c: Cluster, delta: int) -> Kind:
    if c.charge == 0:
        return Kind.NEUTRAL
    if c.boundary_distance <= delta:
        return Kind.BOUNDARY_NEUTRAL
    return Kind.CHARGED


def fuse_cluster(c: Cluster, kind: Kind, g: CodeGeometry, d: int) -> list[tuple[int, int, int]]:
    """Corrections ``(t, edge, exponent)`` annihilating every defect of ``c``.

    Neutral clusters are gathered on their smallest defect. Boundary-neutral
    clusters are gathered on the defect closest to the boundary and the
    leftover charge is pushed into it; a push into the time boundary is free.
    """
    if kind is Kind.CHARGED:
        raise ValueError("a charged cluster cannot be fused")
    target = c.defects[0] if kind is Kind.NEUTRAL else c.anchor
    dst = target[:3]
    out = []
    for df in c.defects:
        if df is target:
            continue
        out.extend(path_corrections(transport_path(df[:3], dst, g.L), df.charge, g))
    if kind is Kind.BOUNDARY_NEUTRAL:
        out.extend(path_corrections(transport_path(dst, c.boundary, g.L), c.charge, g))
    return out


def max_level(dims: Dims) -> int:
    return math.ceil(math.log2(dims.L + dims.T))


def decode(changes: ChangesHistory, g: CodeGeometry, time_boundary: bool = True, trace: list | None = None) -> np.ndarray:
    """Decode S' into a ``(T, n_edges)`` correction history.

    ``time_boundary=False`` closes the future time boundary; this is the
    noise-free 2D round, where every charge must leave through a spatial
    boundary. When ``trace`` is a list, one dict per level is appended.
    """
    if changes.L != g.L:
        raise ValueError("changes history and geometry disagree on L")
    d = changes.d
    dims = Dims(changes.T, changes.L, time_boundary)
    remaining = changes.defects()
    corrections: list[tuple[int, int, int]] = []
    level = 0
    cap = max_level(dims)
    while remaining:
        if level > cap:
            raise RuntimeError(f"decoder did not terminate by level {cap}")
        delta = 1 << level
        groups = cluster_defects(remaining, delta)
        leftover = []
        fused = 0
        for members in groups:
            c = Cluster.from_defects(members, d, dims)
            kind = classify_cluster(c, delta)
            if kind is Kind.CHARGED:
                leftover.extend(members)
                continue
            corrections.extend(fuse_cluster(c, kind, g, d))
            fused += 1
        if trace is not None:
            trace.append({"level": level, "delta": delta, "clusters": len(groups),
                          "fused": fused, "remaining": len(leftover)})
        remaining = leftover
        level += 1
    return corrections_to_history(corrections, changes.T, g, d)


def corrections_to_history(corrections, T: int, g: CodeGeometry, d: int) -> np.ndarray:
    F = np.zeros((T, g.n_edges), dtype=np.int64)
    if corrections:
        ts, es, ks = zip(*corrections)
        np.add.at(F, (np.asarray(ts) - 1, np.asarray(es)), np.asarray(ks, dtype=np.int64))
    return np.mod(F, d)
