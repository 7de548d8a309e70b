"""Syndrome percolation: do 1-connected defect clusters in S' span the code?

Only the x and y directions are checked; a cluster stretched along t cannot
carry a physical logical operator once projected.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .hdrg import cluster_defects
from .history import ChangesHistory, syndrome_changes
from .initstep import initialize
from .lattice import CodeGeometry
from .montecarlo import float_key
from .noise import NoiseParams, generate_histories, rng_stream

CSV_COLUMNS = ["d", "L", "T", "p", "init_depth", "samples", "span_fraction"]


@dataclass(frozen=True)
class PercolationResult:
    spans_x: bool
    spans_y: bool
    largest: int

    @property
    def spans(self) -> bool:
        return self.spans_x or self.spans_y


def percolates(changes: ChangesHistory) -> PercolationResult:
    """Spanning check over the 1-connected clusters of ``changes``.

    A cluster spans x if it holds defects in both columns x=1 and x=L, and
    spans y if it holds defects in both rows y=1 and y=L-1.
    """
    L = changes.L
    spans_x = spans_y = False
    largest = 0
    for members in cluster_defects(changes.defects(), 1):
        largest = max(largest, len(members))
        xs = {df.x for df in members}
        ys = {df.y for df in members}
        spans_x = spans_x or (1 in xs and L in xs)
        spans_y = spans_y or (1 in ys and (L - 1) in ys)
    return PercolationResult(spans_x, spans_y, largest)


def sample_percolation(L: int, d: int, p: float, seed: int, index: int, T: int | None = None, init_depth: int = 0) -> PercolationResult:
    """Percolation check on one freshly sampled S', optionally after initialization."""
    T = L if T is None else T
    g = CodeGeometry(L)
    rng = rng_stream(seed, L, T, d, init_depth, float_key(p), index, purpose="percolation")
    _, syndromes = generate_histories(NoiseParams(p, d), g, T, rng)
    changes = syndrome_changes(syndromes, d)
    if init_depth:
        _, changes = initialize(changes, init_depth, g)
    return percolates(changes)


def span_fraction(L: int, d: int, p: float, samples: int, seed: int, T: int | None = None, init_depth: int = 0) -> float:
    if samples < 1:
        raise ValueError("need at least one sample")
    hits = sum(sample_percolation(L, d, p, seed, i, T, init_depth).spans for i in range(samples))
    return hits / samples


@dataclass(frozen=True)
class SpanEstimate:
    d: int
    L: int
    T: int
    p: float
    init_depth: int
    samples: int
    span_fraction: float


def _span_job(args):
    L, d, p, samples, seed, T, k = args
    return span_fraction(L, d, p, samples, seed, T, k)


def run_percolation(cells, samples: int, seed: int, workers: int = 1) -> list[SpanEstimate]:
    """Spanning fractions for ``Cell``-like objects (``L``, ``d``, ``p``, ``init_depth``, ``T``)."""
    if samples < 1:
        raise ValueError("need at least one sample")
    cells = list(cells)
    jobs = [(c.L, c.d, c.p, samples, seed, c.L if c.T is None else c.T, c.init_depth) for c in cells]
    if workers <= 1:
        fractions = [_span_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            fractions = list(pool.map(_span_job, jobs))
    return [SpanEstimate(c.d, j[0], j[5], c.p, c.init_depth, samples, f) for c, j, f in zip(cells, jobs, fractions)]


def spans_to_csv(rows) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(f"{r.d},{r.L},{r.T},{r.p!r},{r.init_depth},{r.samples},{r.span_fraction!r}")
    return "\n".join(lines) + "\n"
