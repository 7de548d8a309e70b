"""Fault-tolerant trials and batched success-probability estimates.

One trial: sample T rounds of noise, build S', optionally run the
initialization step, decode with HDRG, project the corrections onto the last
error layer, clean up the residual with a noise-free 2D round and check that
what is left is a stabilizer.
"""

from __future__ import annotations

import csv
import io
import json
import math
import struct
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import hdrg
from .history import ChangesHistory, project_correction, syndrome_changes
from .initstep import initialize
from .lattice import CodeGeometry, compute_syndrome, logical_class
from .noise import NoiseParams, generate_histories, rng_stream

CSV_COLUMNS = ["d", "L", "T", "p", "init_depth", "trials", "successes", "p_succ", "stderr", "seed"]


class DecoderIncompleteError(RuntimeError):
    """The noise-free round left a non-trivial syndrome."""


def float_key(p: float) -> int:
    """Stable integer key for a float (its IEEE-754 bit pattern)."""
    return struct.unpack("<Q", struct.pack("<d", float(p)))[0]


@dataclass(frozen=True)
class TrialConfig:
    L: int
    d: int
    p: float
    T: int | None = None
    init_depth: int = 0
    seed: int = 0
    trial: int = 0

    def __post_init__(self):
        if self.T is None:
            object.__setattr__(self, "T", self.L)
        if self.T < 1:
            raise ValueError("need at least one time step")
        if not 0 <= self.init_depth <= 4:
            raise ValueError("initialization depth must be between 0 and 4")
        NoiseParams(self.p, self.d)
        CodeGeometry(self.L)

    def cell_key(self) -> tuple[int, ...]:
        return (self.L, self.T, self.d, self.init_depth, float_key(self.p))

    def rng(self, purpose: str = "trial") -> np.random.Generator:
        return rng_stream(self.seed, *self.cell_key(), self.trial, purpose=purpose)


@dataclass
class TrialOutcome:
    success: bool
    levels: int
    levels_2d: int
    defects_initial: int
    defects_after_init: int
    wall_time: float
    trace: list = field(default_factory=list)


def run_trial(cfg: TrialConfig, geometry: CodeGeometry | None = None) -> TrialOutcome:
    start = time.perf_counter()
    g = geometry or CodeGeometry(cfg.L)
    d = cfg.d
    params = NoiseParams(cfg.p, d)
    if cfg.p == 0:
        errors = np.zeros((cfg.T, g.n_edges), dtype=np.int64)
        syndromes = np.zeros((cfg.T, *g.syndrome_shape), dtype=np.int64)
    else:
        errors, syndromes = generate_histories(params, g, cfg.T, cfg.rng())
    changes = syndrome_changes(syndromes, d)

    init_corrections, reduced = initialize(changes, cfg.init_depth, g)
    trace: list = []
    F = hdrg.decode(reduced, g, trace=trace)
    if init_corrections:
        F = np.mod(F + hdrg.corrections_to_history(init_corrections, cfg.T, g, d), d)
    residual = np.mod(errors[-1] + project_correction(F, d), d)

    # noise-free 2D round on the residual; no time boundary to hide charge in
    flat = ChangesHistory.from_array(compute_syndrome(residual, g, d)[None], d)
    trace_2d: list = []
    f2 = project_correction(hdrg.decode(flat, g, time_boundary=False, trace=trace_2d), d)
    final = np.mod(residual + f2, d)
    if compute_syndrome(final, g, d).any():
        raise DecoderIncompleteError(f"non-trivial syndrome after the noise-free round ({cfg})")
    success = logical_class(final, g, d) == 0
    return TrialOutcome(
        success=success,
        levels=len(trace),
        levels_2d=len(trace_2d),
        defects_initial=len(changes),
        defects_after_init=len(reduced),
        wall_time=time.perf_counter() - start,
        trace=trace,
    )


@dataclass(frozen=True)
class Cell:
    """One point of a sweep."""

    L: int
    d: int
    p: float
    init_depth: int = 0
    T: int | None = None

    def time_steps(self) -> int:
        return self.L if self.T is None else self.T


@dataclass
class SuccessEstimate:
    d: int
    L: int
    T: int
    p: float
    init_depth: int
    trials: int
    successes: int
    p_succ: float
    stderr: float
    seed: int

    @classmethod
    def from_counts(cls, cell: Cell, trials: int, successes: int, seed: int) -> "SuccessEstimate":
        ps = successes / trials
        return cls(cell.d, cell.L, cell.time_steps(), cell.p, cell.init_depth,
                   trials, successes, ps, math.sqrt(ps * (1 - ps) / trials), seed)


def _count_successes(cell: Cell, seed: int, start: int, stop: int) -> int:
    g = CodeGeometry(cell.L)
    wins = 0
    for i in range(start, stop):
        cfg = TrialConfig(cell.L, cell.d, cell.p, cell.time_steps(), cell.init_depth, seed, i)
        wins += run_trial(cfg, g).success
    return wins


def _chunks(n: int, size: int):
    return [(a, min(a + size, n)) for a in range(0, n, size)]


def run_batch(cells, trials: int, seed: int, workers: int = 1, chunk: int = 250) -> list[SuccessEstimate]:
    """Success estimates for each cell from ``trials`` independent trials.

    Trial i of a cell always uses the stream keyed by (seed, cell, i), so the
    result is the same for any ``workers`` and ``chunk``.
    """
    if trials < 1:
        raise ValueError("need at least one trial per cell")
    cells = list(cells)
    jobs = [(ci, a, b) for ci in range(len(cells)) for a, b in _chunks(trials, chunk)]
    wins = [0] * len(cells)
    if workers <= 1:
        for ci, a, b in jobs:
            wins[ci] += _count_successes(cells[ci], seed, a, b)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [(ci, pool.submit(_count_successes, cells[ci], seed, a, b)) for ci, a, b in jobs]
            for ci, fut in futures:
                wins[ci] += fut.result()
    return [SuccessEstimate.from_counts(c, trials, w, seed) for c, w in zip(cells, wins)]


def estimates_to_csv(estimates) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for est in estimates:
        row = asdict(est)
        writer.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def estimates_to_json(estimates) -> str:
    return json.dumps([asdict(e) for e in estimates], indent=2)


def read_estimates_csv(text: str) -> list[SuccessEstimate]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(SuccessEstimate(
            d=int(row["d"]), L=int(row["L"]), T=int(row["T"]), p=float(row["p"]),
            init_depth=int(row["init_depth"]), trials=int(row["trials"]),
            successes=int(row["successes"]), p_succ=float(row["p_succ"]),
            stderr=float(row["stderr"]), seed=int(row["seed"]),
        ))
    return out
