"""Planar qudit surface code geometry for the X-error / plaquette sector.

Layout (all coordinates 1-based)::

    vertical edges    v(x, y)   x in [1, L], y in [1, L]
    horizontal edges  h(x, y)   x in [1, L-1], y in [1, L-1]
    plaquettes        P(x, y)   x in [1, L], y in [1, L-1]

P(x, y) is bordered below by v(x, y), above by v(x, y+1), on the left by
h(x-1, y) and on the right by h(x, y) where those exist. The plaquette
operator carries Z on its bottom and left edges and Z^-1 on its top and right
edges, so an X^k error on an edge adds +k to the plaquette above/right of it
and -k to the plaquette below/left of it.

Smooth boundaries sit beyond rows y=1 (south) and y=L-1 (north); the columns
x=1 and x=L are rough. The Z sector is the same engine on the transposed
geometry and is not modelled separately.

An error layer is a flat integer vector over edges: the L*L vertical edges
first (row-major in x, then y), followed by the (L-1)*(L-1) horizontal edges.
A syndrome layer is an integer array of shape ``(L, L-1)`` indexed
``[x-1, y-1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

SOUTH = "south"
NORTH = "north"
TIME = "time"


class InvalidDistanceError(ValueError):
    """Raised for code distances below 2."""


@dataclass(frozen=True)
class CodeGeometry:
    """Edge/plaquette layout of a distance-``L`` planar surface code."""

    L: int
    _edges: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.L, (int, np.integer)) or self.L < 2:
            raise InvalidDistanceError(f"code distance must be an integer >= 2, got {self.L!r}")
        L = int(self.L)
        object.__setattr__(self, "L", L)
        edges = [("v", x, y) for x in range(1, L + 1) for y in range(1, L + 1)]
        edges += [("h", x, y) for x in range(1, L) for y in range(1, L)]
        object.__setattr__(self, "_edges", tuple(edges))

    @property
    def n_edges(self) -> int:
        return self.L * self.L + (self.L - 1) ** 2

    @property
    def n_vertical(self) -> int:
        return self.L * self.L

    @property
    def n_plaquettes(self) -> int:
        return self.L * (self.L - 1)

    @property
    def syndrome_shape(self) -> tuple[int, int]:
        return (self.L, self.L - 1)

    @property
    def edges(self) -> tuple:
        """Edge labels ``(kind, x, y)`` in storage order."""
        return self._edges

    def plaquettes(self):
        return [(x, y) for x in range(1, self.L + 1) for y in range(1, self.L)]

    def v(self, x: int, y: int) -> int:
        """Index of vertical edge v(x, y)."""
        if not (1 <= x <= self.L and 1 <= y <= self.L):
            raise IndexError(f"v({x}, {y}) outside a distance-{self.L} code")
        return (x - 1) * self.L + (y - 1)

    def h(self, x: int, y: int) -> int:
        """Index of horizontal edge h(x, y)."""
        if not (1 <= x <= self.L - 1 and 1 <= y <= self.L - 1):
            raise IndexError(f"h({x}, {y}) outside a distance-{self.L} code")
        return self.n_vertical + (x - 1) * (self.L - 1) + (y - 1)

    def edge_plaquettes(self, edge: int) -> list[tuple[tuple[int, int], int]]:
        """Plaquettes bordering ``edge`` with the sign of its contribution."""
        kind, x, y = self._edges[edge]
        out = []
        if kind == "v":
            if y <= self.L - 1:
                out.append(((x, y), +1))  # bottom edge of P(x, y)
            if y >= 2:
                out.append(((x, y - 1), -1))  # top edge of P(x, y-1)
        else:
            out.append(((x + 1, y), +1))  # left edge of P(x+1, y)
            out.append(((x, y), -1))  # right edge of P(x, y)
        return out

    def plaquette_edges(self, x: int, y: int) -> list[tuple[int, int]]:
        """Edges ``(index, sign)`` of the Z-type operator on P(x, y)."""
        out = [(self.v(x, y), +1), (self.v(x, y + 1), -1)]
        if x >= 2:
            out.append((self.h(x - 1, y), +1))
        if x <= self.L - 1:
            out.append((self.h(x, y), -1))
        return out

    @cached_property
    def incidence(self) -> np.ndarray:
        """Signed plaquette-by-edge incidence matrix, rows in ``[x-1, y-1]`` order."""
        m = np.zeros((self.n_plaquettes, self.n_edges), dtype=np.int64)
        for x, y in self.plaquettes():
            row = (x - 1) * (self.L - 1) + (y - 1)
            for e, sign in self.plaquette_edges(x, y):
                m[row, e] = sign
        return m

    def vertex_operator(self, x: int, y: int) -> np.ndarray:
        """X-type vertex generator at the corner right of column x, below row y.

        Valid for x in [1, L-1], y in [1, L]. Acts as X on v(x, y) and
        h(x, y), X^-1 on v(x+1, y) and h(x, y-1); the h edges are absent on
        the smooth boundaries, giving the deformed 3-body operators there.
        """
        if not (1 <= x <= self.L - 1 and 1 <= y <= self.L):
            raise IndexError(f"no vertex ({x}, {y}) in a distance-{self.L} code")
        op = np.zeros(self.n_edges, dtype=np.int64)
        op[self.v(x, y)] += 1
        op[self.v(x + 1, y)] -= 1
        if y <= self.L - 1:
            op[self.h(x, y)] += 1
        if y >= 2:
            op[self.h(x, y - 1)] -= 1
        return op

    def vertices(self):
        return [(x, y) for x in range(1, self.L) for y in range(1, self.L + 1)]

    def logical_x(self, k: int = 1, column: int = 1) -> np.ndarray:
        """X-bar^k: a column of vertical edges joining the two smooth boundaries."""
        op = np.zeros(self.n_edges, dtype=np.int64)
        for y in range(1, self.L + 1):
            op[self.v(column, y)] = k
        return op

    def split(self, layers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """View ``(..., n_edges)`` data as vertical ``(..., L, L)`` and horizontal ``(..., L-1, L-1)`` blocks."""
        L = self.L
        lead = layers.shape[:-1]
        vert = layers[..., : L * L].reshape(*lead, L, L)
        horiz = layers[..., L * L :].reshape(*lead, L - 1, L - 1)
        return vert, horiz


def build_geometry(L: int) -> CodeGeometry:
    return CodeGeometry(L)


def compute_syndrome(e: np.ndarray, g: CodeGeometry, d: int) -> np.ndarray:
    """Plaquette charges of an error layer (or a stack of layers).

    ``e`` has shape ``(..., n_edges)``; the result has shape ``(..., L, L-1)``.
    """
    e = np.asarray(e, dtype=np.int64)
    if e.shape[-1] != g.n_edges:
        raise ValueError(f"error layer has {e.shape[-1]} entries, expected {g.n_edges}")
    vert, horiz = g.split(e)
    s = vert[..., :, :-1] - vert[..., :, 1:]
    s[..., 1:, :] += horiz
    s[..., :-1, :] -= horiz
    return np.mod(s, d)


def logical_class(e: np.ndarray, g: CodeGeometry, d: int, cut_row: int = 1) -> int:
    """Z_d winding of a syndrome-free error across the smooth boundaries.

    Sum of the vertical-edge exponents along the cut row ``y = cut_row``.
    X-bar^k on any column gives k; every vertex operator gives 0.
    """
    vert, _ = g.split(np.asarray(e, dtype=np.int64))
    return int(vert[:, cut_row - 1].sum() % d)


def is_stabilizer(e: np.ndarray, g: CodeGeometry, d: int) -> bool:
    if compute_syndrome(e, g, d).any():
        return False
    return logical_class(e, g, d) == 0


def transport_path(src, dst, L: int) -> list[tuple[str, int, int, int, int]]:
    """Unit moves of a monotone Manhattan path between two spacetime sites.

    ``src`` is a ``(t, x, y)`` plaquette site; ``dst`` is either another site
    or one of the boundary names ``SOUTH``, ``NORTH``, ``TIME``. Time moves
    come first, then x, then y. Each spatial move is ``(axis, step, t, x, y)``
    giving the starting plaquette; it is expanded to an edge by
    :func:`path_corrections`.
    """
    t, x, y = src
    if dst == SOUTH:
        return [("y", -1, t, x, yy) for yy in range(y, 0, -1)]
    if dst == NORTH:
        return [("y", +1, t, x, yy) for yy in range(y, L)]
    if dst == TIME:
        return []
    t2, x2, y2 = dst
    moves = []
    # time-like steps carry no operator; only record the layer change
    step = 1 if x2 >= x else -1
    for xx in range(x, x2, step):
        moves.append(("x", step, t2, xx, y))
    step = 1 if y2 >= y else -1
    for yy in range(y, y2, step):
        moves.append(("y", step, t2, x2, yy))
    return moves


def path_corrections(moves, a: int, g: CodeGeometry):
    """Yield ``(t, edge, exponent)`` carrying charge ``a`` along ``moves``.

    Crossing an edge in the +x/+y direction uses X^a, the reverse X^-a.
    Exponents are left unreduced; callers reduce mod d.
    """
    L = g.L
    nv = L * L
    for axis, step, t, x, y in moves:
        if axis == "x":
            # P(x, y) -> P(x+step, y) crosses h(min(x, x+step), y)
            xe = x if step > 0 else x - 1
            yield t, nv + (xe - 1) * (L - 1) + (y - 1), step * a
        else:
            # P(x, y) -> P(x, y+step) crosses v(x, max(y, y+step))
            ye = y + 1 if step > 0 else y
            yield t, (x - 1) * L + (ye - 1), step * a


def transport_correction(src, dst, a: int, g: CodeGeometry, d: int) -> np.ndarray:
    """Edge operator moving charge ``a`` from ``src`` to ``dst``.

    Sites are ``(x, y)`` plaquettes or boundary names. Applying the result
    changes the syndrome by -a at ``src`` and +a at ``dst``; a boundary
    endpoint absorbs the charge.
    """
    op = np.zeros(g.n_edges, dtype=np.int64)
    if a % d == 0:
        return op
    if src in (SOUTH, NORTH):
        # reverse a boundary-to-site move
        return np.mod(-transport_correction(dst, src, a, g, d), d)
    s3 = (1, *src)
    d3 = dst if dst in (SOUTH, NORTH) else (1, *dst)
    for _, edge, exp in path_corrections(transport_path(s3, d3, g.L), a, g):
        op[edge] += exp
    return np.mod(op, d)
