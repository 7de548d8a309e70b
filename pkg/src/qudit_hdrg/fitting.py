"""Threshold estimation by finite-size rescaling.

Near the crossing the success probability is modelled as

    P(p, L) = A + B x + C x^2 + D L^(-1/mu),    x = (p - p_th) L^(1/nu)

For fixed (p_th, nu, mu) the model is linear in (A, B, C, D) and is solved by
weighted linear least squares; the three nonlinear parameters are found with a
bounded Nelder-Mead search over that profile. The error on p_th comes from a
row bootstrap.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

NU_BOUNDS = (0.5, 3.0)
MU_BOUNDS = (0.3, 5.0)


class FitDegenerateError(ValueError):
    """The data carry no information about a crossing."""


class WindowError(ValueError):
    """No usable window around a crossing could be selected."""


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass
class DataWindow:
    L: np.ndarray
    p: np.ndarray
    p_succ: np.ndarray
    stderr: np.ndarray
    p_lo: float
    p_hi: float
    crossing: float | None = None

    @classmethod
    def from_rows(cls, rows, p_lo: float | None = None, p_hi: float | None = None, crossing: float | None = None) -> "DataWindow":
        """Build from objects with ``L``, ``p``, ``p_succ`` and ``stderr`` attributes."""
        rows = list(rows)
        L = np.array([r.L for r in rows], dtype=float)
        p = np.array([r.p for r in rows], dtype=float)
        ps = np.array([r.p_succ for r in rows], dtype=float)
        se = np.array([r.stderr for r in rows], dtype=float)
        lo = float(p.min()) if p_lo is None else p_lo
        hi = float(p.max()) if p_hi is None else p_hi
        return cls(L, p, ps, se, lo, hi, crossing)

    def __len__(self):
        return len(self.p)

    def take(self, idx) -> "DataWindow":
        return DataWindow(self.L[idx], self.p[idx], self.p_succ[idx], self.stderr[idx],
                          self.p_lo, self.p_hi, self.crossing)


@dataclass
class ThresholdFit:
    p_th: float
    nu: float
    mu: float
    A: float
    B: float
    C: float
    D: float
    rss: float
    p_th_stderr: float
    window: tuple[float, float]
    n_rows: int
    n_bootstrap: int
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _design(theta, L, p):
    p_th, nu, mu = theta
    x = (p - p_th) * L ** (1.0 / nu)
    return np.column_stack([np.ones_like(x), x, x * x, L ** (-1.0 / mu)])


def _weights(stderr: np.ndarray) -> np.ndarray:
    positive = stderr[stderr > 0]
    floor = positive.min() if positive.size else 1.0
    return 1.0 / np.maximum(stderr, floor) ** 2


def _profile(theta, L, p, y, sw):
    X = _design(theta, L, p) * sw[:, None]
    coef, *_ = np.linalg.lstsq(X, y * sw, rcond=None)
    r = y * sw - X @ coef
    return float(r @ r), coef


def _check(window: DataWindow) -> None:
    if len(np.unique(window.L)) < 3 or len(np.unique(window.p)) < 3:
        raise FitDegenerateError("need at least 3 distinct L and 3 distinct p values")
    if np.ptp(window.p_succ) == 0:
        raise FitDegenerateError("success probability is constant over the window")


def _minimize(window: DataWindow, starts, max_iter: int):
    L, p, y = window.L, window.p, window.p_succ
    sw = np.sqrt(_weights(window.stderr))
    bounds = [(window.p_lo, window.p_hi), NU_BOUNDS, MU_BOUNDS]
    best = None
    for x0 in starts:
        res = minimize(lambda th: _profile(th, L, p, y, sw)[0], x0, method="Nelder-Mead",
                       bounds=bounds,
                       options={"maxiter": max_iter, "xatol": 1e-9, "fatol": 1e-12})
        if best is None or res.fun < best.fun:
            best = res
    return best, _profile(best.x, L, p, y, sw)[1]


def fit_threshold(window: DataWindow, bootstrap: int = 200, seed: int = 0, max_iter: int = 5000) -> ThresholdFit:
    """Fit the rescaled quadratic with finite-size correction to ``window``.

    The search starts at nu = mu = 1 from five p_th values spread over the
    window (including its centre); the lowest residual wins.
    """
    _check(window)
    lo, hi = window.p_lo, window.p_hi
    centre = window.crossing if window.crossing is not None else 0.5 * (lo + hi)
    starts = [(pc, 1.0, 1.0) for pc in (centre, *np.linspace(lo, hi, 6)[1:-1])]
    res, coef = _minimize(window, starts, max_iter)
    if not res.success:
        raise ConvergenceError(f"simplex search did not converge: {res.message}",
                               {"iterations": int(res.nit), "evaluations": int(res.nfev),
                                "theta": res.x.tolist(), "rss": float(res.fun)})

    rng = np.random.default_rng(seed)
    samples = []
    n = len(window)
    attempts = 0
    while len(samples) < bootstrap:
        attempts += 1
        if attempts > 20 * bootstrap:
            break
        idx = rng.integers(0, n, size=n)
        sub = window.take(idx)
        try:
            _check(sub)
        except FitDegenerateError:
            continue
        bres, _ = _minimize(sub, [tuple(res.x)], max_iter)
        samples.append(bres.x[0])
    p_se = float(np.std(samples, ddof=1)) if len(samples) > 1 else float("nan")

    p_th, nu, mu = (float(v) for v in res.x)
    return ThresholdFit(
        p_th=p_th, nu=nu, mu=mu,
        A=float(coef[0]), B=float(coef[1]), C=float(coef[2]), D=float(coef[3]),
        rss=float(res.fun), p_th_stderr=p_se, window=(lo, hi), n_rows=n,
        n_bootstrap=len(samples),
        diagnostics={"iterations": int(res.nit), "evaluations": int(res.nfev),
                     "crossing": window.crossing},
    )


def crossing_point(rows, L_small: int, L_large: int) -> float:
    """First p where the L_large curve drops below the L_small curve (linear interpolation)."""
    by_l = {}
    for r in rows:
        by_l.setdefault(r.L, {})[r.p] = r.p_succ
    common = sorted(set(by_l.get(L_small, {})) & set(by_l.get(L_large, {})))
    diff = [by_l[L_large][p] - by_l[L_small][p] for p in common]
    for (p0, d0), (p1, d1) in zip(zip(common, diff), zip(common[1:], diff[1:])):
        if d0 >= 0 > d1:
            return p0 + (p1 - p0) * d0 / (d0 - d1)
    raise WindowError(f"curves for L={L_small} and L={L_large} do not cross in the sampled range")


def select_window(rows, half_width: float) -> DataWindow:
    """Rows with p within ``half_width`` of the crossing of the two largest-L curves.

    The minimum row counts needed for a fit are checked by :func:`fit_threshold`.
    """
    rows = list(rows)
    if not rows:
        raise WindowError("empty table")
    sizes = sorted({r.L for r in rows})
    if len(sizes) < 2:
        raise WindowError("need at least two lattice sizes to locate a crossing")
    pc = crossing_point(rows, sizes[-2], sizes[-1])
    eps = 1e-12
    kept = [r for r in rows if abs(r.p - pc) <= half_width + eps]
    if not kept:
        raise WindowError(f"no rows within {half_width} of the crossing at p={pc:.5g}")
    return DataWindow.from_rows(kept, crossing=pc)
