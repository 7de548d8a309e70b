"""Command-line front end.

Subcommands: trial, sweep, percolation, fit, bench. Exit codes are 0 on
success, 1 for runtime or I/O failures and 2 for usage errors. Table outputs
written with ``--out`` get a ``<out>.manifest.json`` next to them whose
``argv`` entry reproduces the file exactly.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, hdrg
from .fitting import ConvergenceError, FitDegenerateError, WindowError, fit_threshold, select_window
from .history import syndrome_changes
from .initstep import initialize
from .lattice import CodeGeometry
from .montecarlo import (Cell, TrialConfig, estimates_to_csv, estimates_to_json,
                         read_estimates_csv, run_batch, run_trial)
from .noise import NoiseParams, generate_histories, rng_stream
from .percolation import run_percolation, spans_to_csv


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def _rates(text: str) -> list[float]:
    """``a,b,c`` or an inclusive range ``start:stop:step``."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError
            n = int(round((stop - start) / step))
            return [round(start + i * step, 12) for i in range(n + 1)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a rate list or start:stop:step range: {text!r}")


def _add_common(sp, multi: bool = True):
    if multi:
        sp.add_argument("--distances", type=_int_list, required=True)
        sp.add_argument("--rates", type=_rates, required=True)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--init-depth", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qudit-hdrg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("trial", help="run one fault-tolerant trial")
    sp.add_argument("--distance", type=int, required=True)
    sp.add_argument("--rate", type=float, required=True)
    sp.add_argument("--time-steps", type=int, default=None)
    sp.add_argument("--trial-index", type=int, default=0)
    sp.add_argument("--trace", action="store_true", help="include per-level cluster counts")
    _add_common(sp, multi=False)

    sp = sub.add_parser("sweep", help="success probabilities over (L, p)")
    _add_common(sp)
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--time-steps", type=int, default=None)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--out", type=Path, default=None)
    sp.add_argument("--threads", type=int, default=None)

    sp = sub.add_parser("percolation", help="syndrome-percolation spanning fractions")
    _add_common(sp)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--time-steps", type=int, default=None)
    sp.add_argument("--out", type=Path, default=None)
    sp.add_argument("--threads", type=int, default=None)

    sp = sub.add_parser("fit", help="threshold fit of a sweep CSV")
    sp.add_argument("--input", type=Path, required=True)
    sp.add_argument("--half-width", type=float, default=0.006)
    sp.add_argument("--dim", type=int, default=None, help="keep rows with this d only")
    sp.add_argument("--init-depth", type=int, default=None, help="keep rows with this depth only")
    sp.add_argument("--bootstrap", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=Path, default=None)

    sp = sub.add_parser("bench", help="median decode time against L")
    sp.add_argument("--distances", type=_int_list, required=True)
    sp.add_argument("--rate", type=float, required=True)
    sp.add_argument("--samples", type=int, default=20)
    _add_common(sp, multi=False)
    return parser


def _validate(parser, args) -> None:
    def bad(msg):
        parser.error(msg)

    if getattr(args, "dim", None) is not None and args.dim < 2:
        bad("--dim must be >= 2")
    if getattr(args, "init_depth", None) is not None and not 0 <= args.init_depth <= 4:
        bad("--init-depth must be between 0 and 4")
    if getattr(args, "seed", 0) is not None and not 0 <= args.seed < 2**64:
        bad("--seed must be a 64-bit unsigned integer")
    if getattr(args, "time_steps", None) is not None and args.time_steps < 1:
        bad("--time-steps must be >= 1")
    for L in [getattr(args, "distance", 2)] + list(getattr(args, "distances", None) or []):
        if L < 2:
            bad(f"distance {L} is invalid; need L >= 2")
    rates = [getattr(args, "rate", 0.0)] + list(getattr(args, "rates", None) or [])
    if any(not 0.0 <= p < 1.0 for p in rates):
        bad("error rates must lie in [0, 1)")
    if getattr(args, "trials", 1) < 1:
        bad("--trials must be >= 1")
    if getattr(args, "samples", 1) < 1:
        bad("--samples must be >= 1")
    if getattr(args, "threads", None) is not None and args.threads < 1:
        bad("--threads must be >= 1")
    if args.command in ("sweep", "percolation") and (not args.distances or not args.rates):
        bad("need at least one distance and one rate")
    if args.command == "bench" and len(set(args.distances)) < 3:
        bad("bench needs at least 3 distinct distances to estimate a slope")


def _manifest(command: str, argv: list[str], args) -> dict:
    params = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()
              if k not in ("out", "threads", "command")}
    return {"command": command, "argv": argv, "parameters": params, "version": __version__}


def _normalized_argv(args, skip=("threads",)) -> list[str]:
    """Argument list that re-creates ``args`` (worker count omitted: it never changes output)."""
    argv = [args.command]
    for key, value in vars(args).items():
        if key == "command" or key in skip or value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        elif isinstance(value, list):
            argv += [flag, ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)]
        else:
            argv += [flag, str(value)]
    return argv


def _emit(text: str, out: Path | None, manifest: dict | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if manifest is not None:
            sys.stderr.write(json.dumps(manifest, sort_keys=True) + "\n")
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    if manifest is not None:
        Path(str(out) + ".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _workers(args) -> int:
    return args.threads or os.cpu_count() or 1


def cmd_trial(args) -> int:
    cfg = TrialConfig(args.distance, args.dim, args.rate, args.time_steps, args.init_depth,
                      args.seed, args.trial_index)
    out = run_trial(cfg)
    report = {"L": cfg.L, "T": cfg.T, "d": cfg.d, "p": cfg.p, "init_depth": cfg.init_depth,
              "seed": cfg.seed, "trial": cfg.trial, "success": bool(out.success),
              "levels": out.levels, "levels_2d": out.levels_2d,
              "defects_initial": out.defects_initial, "defects_after_init": out.defects_after_init,
              "wall_time": out.wall_time}
    if args.trace:
        report["trace"] = out.trace
    print(json.dumps(report, indent=2))
    return 0


def _cells(args) -> list[Cell]:
    return [Cell(L, args.dim, p, args.init_depth, args.time_steps) for L in args.distances for p in args.rates]


def cmd_sweep(args) -> int:
    estimates = run_batch(_cells(args), args.trials, args.seed, workers=_workers(args))
    text = estimates_to_csv(estimates) if args.format == "csv" else estimates_to_json(estimates) + "\n"
    _emit(text, args.out, _manifest("sweep", _normalized_argv(args), args))
    return 0


def cmd_percolation(args) -> int:
    rows = run_percolation(_cells(args), args.samples, args.seed, workers=_workers(args))
    _emit(spans_to_csv(rows), args.out, _manifest("percolation", _normalized_argv(args), args))
    return 0


def cmd_fit(args) -> int:
    rows = read_estimates_csv(args.input.read_text())
    if args.dim is not None:
        rows = [r for r in rows if r.d == args.dim]
    if args.init_depth is not None:
        rows = [r for r in rows if r.init_depth == args.init_depth]
    window = select_window(rows, args.half_width)
    fit = fit_threshold(window, bootstrap=args.bootstrap, seed=args.seed)
    report = fit.to_dict()
    report["input"] = str(args.input)
    report["half_width"] = args.half_width
    report["rows"] = [{"L": int(L), "p": float(p), "p_succ": float(s), "stderr": float(e)}
                      for L, p, s, e in zip(window.L, window.p, window.p_succ, window.stderr)]
    manifest = _manifest("fit", _normalized_argv(args), args)
    report["manifest"] = manifest
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out, manifest if args.out else None)
    return 0


def bench(distances, d: int, p: float, samples: int, seed: int = 0, init_depth: int = 0) -> dict:
    """Median wall time of initialization + 3D decoding per distance, and its log-log slope."""
    rows = []
    for L in distances:
        g = CodeGeometry(L)
        times, defects = [], []
        for i in range(samples):
            rng = rng_stream(seed, L, d, i, purpose="bench")
            _, syndromes = generate_histories(NoiseParams(p, d), g, L, rng)
            changes = syndrome_changes(syndromes, d)
            start = time.perf_counter()
            _, reduced = initialize(changes, init_depth, g)
            hdrg.decode(reduced, g)
            times.append(time.perf_counter() - start)
            defects.append(len(changes))
        rows.append({"L": L, "median_seconds": statistics.median(times),
                     "mean_defects": float(np.mean(defects))})
    logs = np.log([r["L"] for r in rows]), np.log([r["median_seconds"] for r in rows])
    slope = float(np.polyfit(*logs, 1)[0])
    return {"d": d, "p": p, "samples": samples, "init_depth": init_depth, "rows": rows, "slope": slope}


def cmd_bench(args) -> int:
    report = bench(args.distances, args.dim, args.rate, args.samples, args.seed, args.init_depth)
    print(json.dumps(report, indent=2))
    return 0


COMMANDS = {"trial": cmd_trial, "sweep": cmd_sweep, "percolation": cmd_percolation,
            "fit": cmd_fit, "bench": cmd_bench}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    try:
        return COMMANDS[args.command](args)
    except (OSError, WindowError, FitDegenerateError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
