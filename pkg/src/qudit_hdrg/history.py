"""Syndrome-changes history S' and projection of spacetime corrections."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class Defect(NamedTuple):
    """Non-trivial syndrome change at plaquette (x, y) in round t (1-based)."""

    t: int
    x: int
    y: int
    charge: int


@dataclass
class ChangesHistory:
    """Sparse S': ``charges`` maps ``(t, x, y)`` to a non-zero charge in [1, d-1].

    Grid: t in [1, T], x in [1, L], y in [1, L-1].
    """

    T: int
    L: int
    d: int
    charges: dict = field(default_factory=dict)

    @classmethod
    def from_array(cls, changes: np.ndarray, d: int) -> "ChangesHistory":
        changes = np.mod(np.asarray(changes, dtype=np.int64), d)
        T, L, ly = changes.shape
        if ly != L - 1:
            raise ValueError(f"syndrome grid {L}x{ly} is not L x (L-1)")
        ts, xs, ys = np.nonzero(changes)
        vals = changes[ts, xs, ys]
        charges = dict(zip(zip((ts + 1).tolist(), (xs + 1).tolist(), (ys + 1).tolist()), vals.tolist()))
        return cls(T, L, d, charges)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.T, self.L, self.L - 1), dtype=np.int64)
        for (t, x, y), c in self.charges.items():
            out[t - 1, x - 1, y - 1] = c
        return out

    def defects(self) -> list[Defect]:
        """Defects in lexicographic (t, x, y) order."""
        return [Defect(*site, c) for site, c in sorted(self.charges.items())]

    def __len__(self):
        return len(self.charges)

    def total_charge(self) -> int:
        return sum(self.charges.values()) % self.d

    def contains(self, site) -> bool:
        t, x, y = site
        return 1 <= t <= self.T and 1 <= x <= self.L and 1 <= y <= self.L - 1

    def to_json(self) -> str:
        """Debug dump: grid size plus ``[t, x, y, charge]`` tuples."""
        return json.dumps({"T": self.T, "L": self.L, "d": self.d,
                           "defects": [list(df) for df in self.defects()]})

    @classmethod
    def from_json(cls, text: str) -> "ChangesHistory":
        data = json.loads(text)
        charges = {(t, x, y): c for t, x, y, c in data["defects"]}
        return cls(data["T"], data["L"], data["d"], charges)


def syndrome_changes(syndromes: np.ndarray, d: int) -> ChangesHistory:
    """S' from measured syndromes of shape ``(T, L, L-1)``; s'_1 = s_1."""
    s = np.asarray(syndromes, dtype=np.int64)
    if s.ndim != 3:
        raise ValueError(f"expected a (T, L, L-1) syndrome history, got shape {s.shape}")
    if s.shape[2] != s.shape[1] - 1:
        raise ValueError(f"syndrome grid {s.shape[1]}x{s.shape[2]} is not L x (L-1)")
    changes = np.diff(s, axis=0, prepend=0)
    return ChangesHistory.from_array(changes, d)


def project_correction(F: np.ndarray, d: int) -> np.ndarray:
    """Collapse a ``(T, n_edges)`` correction history to one layer (sum mod d)."""
    return np.mod(np.asarray(F, dtype=np.int64).sum(axis=0), d)
