"""Divergence-line location, curvature divergence exponents, and
turning-point (conjugacy) scans.

A line where the constant-X heat capacity blows up is the zero set of M_SS;
the constant-Y analogue is the zero set of the Hessian determinant.  Both
are located by bracketing sign changes along one-dimensional sweeps and
refining with a secant/bisection hybrid.

Divergence rates are estimated from observables only: curvature values are
sampled along a straight approach to the line with geometrically shrinking
displacement, and the slope of log|R| against log|f| is fitted by least
squares, where f is the root function's own value along the approach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._roots import expand_bracket, refine_bracket
from .geometry import StatePoint, curvature_from_m_jet
from .jets import Jet3
from .potentials import PotentialSpec, eval_jet

__all__ = [
    "DaviesLocus", "BracketInfo", "ExponentFit", "ConjugacyScan",
    "find_davies_points", "fit_divergence_exponent", "conjugacy_scan",
]

_ROOT_KINDS = ("cx", "cy")


@dataclass(frozen=True)
class BracketInfo:
    lo: float
    hi: float
    f_lo: float
    f_hi: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class DaviesLocus:
    """Roots of a divergence function along one sweep slice.

    ``rejected`` lists sign changes that were dropped because the
    temperature vanishes there (extremal boundary rather than a divergence
    of a heat capacity at positive temperature).
    """

    which: str                       # "cx" | "cy"
    points: tuple[StatePoint, ...]
    f_def: str
    brackets: tuple[BracketInfo, ...]
    rejected: tuple[StatePoint, ...] = ()


@dataclass(frozen=True)
class ExponentFit:
    """Log-log divergence fit along an approach to a divergence line.

    ``kind`` is "divergent" when |R| grows strongly toward the line (the
    slope/intercept then describe |R| ~ 10^intercept * f^slope) and "finite"
    otherwise, in which case ``limit`` extrapolates R to f -> 0.
    """

    kind: str
    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, ...]        # |f| per sample, outermost first
    values: tuple[float, ...]        # curvature per sample
    limit: float | None = None


@dataclass(frozen=True)
class ConjugacyScan:
    """(control, conjugate) samples along an equilibrium series plus the
    sweep-parameter values where the control variable turns around."""

    series: tuple[tuple[float, float], ...]
    turning_points: tuple[float, ...]
    which: str
    fixed_value: float


def _root_function(which: str):
    if which == "cx":
        def f(jet: Jet3) -> float:
            return jet.ss
        return f, "M_SS (denominator scale of the constant-X heat capacity)"
    if which == "cy":
        def f(jet: Jet3) -> float:
            return jet.ss * jet.xx - jet.sx * jet.sx
        return f, ("Hessian determinant (denominator scale of the "
                   "constant-Y heat capacity)")
    raise ValueError(f"which must be one of {_ROOT_KINDS}, got {which!r}")


def _grid(lo: float, hi: float, count: int, spacing: str) -> np.ndarray:
    if count < 2:
        raise ValueError("sweep needs at least 2 samples")
    if spacing == "log":
        if lo <= 0.0:
            raise ValueError("log spacing requires a positive lower bound")
        return np.geomspace(lo, hi, count)
    if spacing == "linear":
        return np.linspace(lo, hi, count)
    raise ValueError(f"unknown spacing {spacing!r}")


def find_davies_points(
    spec: PotentialSpec,
    which: str,
    *,
    fixed: str,
    fixed_value: float,
    sweep: tuple[float, float],
    count: int = 200,
    spacing: str = "linear",
    eps: float | None = None,
) -> DaviesLocus:
    """Locate divergence-line crossings along one sweep slice.

    One coordinate (named by ``fixed``) is held at ``fixed_value`` while the
    other runs over ``sweep``; every sign change of the root function is
    refined until |f| <= 1e-12 * scale.  An empty locus is a normal outcome,
    not an error.
    """
    root_fn, f_def = _root_function(which)
    if fixed not in spec.coords:
        raise ValueError(f"{fixed!r} is not a coordinate of {spec.name!r}")
    fixed_idx = spec.coords.index(fixed)
    sweep_idx = 1 - fixed_idx

    def to_point(u: float) -> StatePoint:
        vals = [0.0, 0.0]
        vals[fixed_idx] = fixed_value
        vals[sweep_idx] = u
        return StatePoint(*vals)

    def g(u: float) -> float:
        return root_fn(eval_jet(spec, to_point(u)))

    grid = _grid(*sweep, count, spacing)
    samples = [(float(u), g(float(u))) for u in grid]

    points, brackets, rejected = [], [], []
    for (u0, f0), (u1, f1) in zip(samples, samples[1:]):
        if not (math.isfinite(f0) and math.isfinite(f1)):
            continue
        if f0 == 0.0 or (f0 > 0.0) == (f1 > 0.0):
            continue
        # tolerance scaled by the local f magnitude, not the whole sweep
        tol_f = 1e-12 * max(1.0, abs(f0), abs(f1))
        root, resid, iters = refine_bracket(g, u0, u1, f0, f1, tol_f=tol_f)
        pt = to_point(root)
        temperature = eval_jet(spec, pt).s
        if temperature <= 1e-10 * max(1.0, abs(root)):
            rejected.append(pt)
            continue
        points.append(pt)
        brackets.append(BracketInfo(u0, u1, f0, f1, resid, iters))
    return DaviesLocus(which=which, points=tuple(points), f_def=f_def,
                       brackets=tuple(brackets), rejected=tuple(rejected))


def fit_divergence_exponent(
    spec: PotentialSpec,
    locus_point: StatePoint,
    which_r: str,
    *,
    which_line: str = "cx",
    direction: tuple[float, float] = (1.0, 0.0),
    start: float = 0.05,
    halvings: int = 10,
    eps: float | None = None,
) -> ExponentFit:
    """Estimate how a curvature scalar behaves while approaching a
    divergence line.

    Points are sampled at displacements ``start * 2**-j`` along
    ``direction`` from the line (so |f| shrinks geometrically, anchored by
    the local directional derivative of the root function); log10|R| is
    fitted against log10|f|.  A curvature that stays bounded along the
    window is reported as a finite-limit outcome with the f -> 0
    extrapolation, not as a failure.
    """
    if which_r not in ("rm", "rf"):
        raise ValueError(f"which_r must be 'rm' or 'rf', got {which_r!r}")
    root_fn, _ = _root_function(which_line)
    norm = math.hypot(*direction)
    if norm == 0.0:
        raise ValueError("direction must be nonzero")
    ds, dx = direction[0] / norm, direction[1] / norm

    window, values, companions = [], [], []
    for j in range(halvings + 1):
        t_j = start * 0.5 ** j
        pt = StatePoint(locus_point.s + t_j * ds, locus_point.x + t_j * dx)
        jet = eval_jet(spec, pt)
        f_val = abs(root_fn(jet))
        if f_val == 0.0:
            continue  # measure-zero landing exactly on the line
        curv = curvature_from_m_jet(jet, eps=eps)
        r_val = curv.r_m if which_r == "rm" else curv.r_f
        window.append(f_val)
        values.append(r_val)
        companions.append(curv.r_f if which_r == "rm" else curv.r_m)

    if len(window) < 6:
        raise ValueError("approach produced fewer than 6 usable samples")

    abs_vals = [abs(v) for v in values]
    tiny = 1e-300
    log_f = np.log10(window)
    log_r = np.log10([max(v, tiny) for v in abs_vals])
    slope, intercept = np.polyfit(log_f, log_r, 1)
    fitted = slope * log_f + intercept
    ss_res = float(np.sum((log_r - fitted) ** 2))
    ss_tot = float(np.sum((log_r - np.mean(log_r)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 0.0

    companion_scale = max(1.0, max(abs(c) for c in companions))
    negligible = max(abs_vals) <= 1e-9 * companion_scale
    growth = (abs_vals[-1] + tiny) / (abs_vals[0] + tiny)
    divergent = (not negligible) and growth >= 1e2 and slope <= -0.5

    limit = None
    if not divergent:
        # quadratic extrapolation to f = 0 from the innermost samples
        k = min(5, len(window))
        coeffs = np.polyfit(window[-k:], values[-k:], 2)
        limit = float(np.polyval(coeffs, 0.0))
    return ExponentFit(kind="divergent" if divergent else "finite",
                       slope=float(slope), intercept=float(intercept),
                       r_squared=float(r_squared), window=tuple(window),
                       values=tuple(values), limit=limit)


def conjugacy_scan(
    spec: PotentialSpec,
    series: str,
    *,
    fixed_value: float,
    sweep: tuple[float, float],
    count: int = 200,
    spacing: str = "linear",
    x_guess: float = 1.0,
) -> ConjugacyScan:
    """Sample a one-parameter equilibrium series and flag turning points.

    ``series`` selects the family: ``"fixed-x"`` holds the control parameter
    and sweeps the entropy, sampling (T, S); ``"fixed-y"`` holds the
    conjugate variable Y instead, solving X at every entropy sample.  A
    turning point is a sweep value where the control variable's derivative
    changes sign (a vertical tangent of the conjugacy diagram); detection
    uses a central difference over the grid and refinement bisects the exact
    jet derivative.
    """
    s_grid = _grid(*sweep, count, spacing)

    if series == "fixed-x":
        def state(s: float) -> StatePoint:
            return StatePoint(s, fixed_value)

        def deriv(s: float) -> float:   # dT/dS at fixed X
            return eval_jet(spec, state(s)).ss
    elif series == "fixed-y":
        x_lo, x_hi = spec.domain[1]
        last_x = [x_guess]

        def solve_x(s: float) -> float:
            def resid(x: float) -> float:
                return eval_jet(spec, (s, x)).x - fixed_value
            a, b, fa, fb = expand_bracket(
                resid, last_x[0], x_lo, x_hi,
                first_step=0.05 * max(1.0, abs(last_x[0])))
            root, _, _ = refine_bracket(
                resid, a, b, fa, fb,
                tol_f=1e-13 * max(1.0, abs(fixed_value)))
            last_x[0] = root
            return root

        def state(s: float) -> StatePoint:
            return StatePoint(s, solve_x(s))

        def deriv(s: float) -> float:   # dT/dS along constant Y
            jet = eval_jet(spec, state(s))
            det_h = jet.ss * jet.xx - jet.sx * jet.sx
            return det_h / jet.xx
    else:
        raise ValueError(f"series must be 'fixed-x' or 'fixed-y', got {series!r}")

    samples = []
    for s in s_grid:
        jet = eval_jet(spec, state(float(s)))
        samples.append((float(jet.s), float(s)))   # (control T, conjugate S)

    turning = []
    svals = [c for _, c in samples]
    tvals = [t for t, _ in samples]
    cd = [(tvals[k + 1] - tvals[k - 1]) / (svals[k + 1] - svals[k - 1])
          for k in range(1, len(samples) - 1)]
    for k in range(len(cd) - 1):
        if cd[k] == 0.0 or (cd[k] > 0.0) == (cd[k + 1] > 0.0):
            continue
        a, b = svals[k + 1], svals[k + 2]
        fa, fb = deriv(a), deriv(b)
        if fa == 0.0:
            turning.append(a)
            continue
        if (fa > 0.0) == (fb > 0.0):
            a, b = svals[k], svals[k + 3 if k + 3 < len(svals) else k + 2]
            fa, fb = deriv(a), deriv(b)
            if (fa > 0.0) == (fb > 0.0):
                continue  # central-difference aliasing, no exact sign change
        # plain bisection on the exact derivative
        for _ in range(200):
            mid = 0.5 * (a + b)
            fm = deriv(mid)
            if fm == 0.0 or b - a <= 1e-13 * max(1.0, abs(mid)):
                break
            if (fm > 0.0) == (fa > 0.0):
                a, fa = mid, fm
            else:
                b, fb = mid, fm
        turning.append(0.5 * (a + b))

    return ConjugacyScan(series=tuple(samples), turning_points=tuple(turning),
                         which=series, fixed_value=fixed_value)
