"""Second-order response functions from the potential Hessian.

Everything here comes from implicit-function algebra on the exact jet
Hessian, never from differencing solver output, so the identity checks probe
the mathematics rather than the numerics.

Sign conventions: with the convention dM = T dS + Y dX used throughout, the
susceptibilities and the thermal coefficient are taken as

    alpha   = X^-1 (dX/dT)_Y,
    kappa_T = X^-1 (dX/dY)_T,
    kappa_S = X^-1 (dX/dY)_S,

i.e. without the extra minus sign that fluid-thermodynamics conventions
attach (there Y is minus the pressure, which flips the sign back).  With
these choices all the standard relations hold exactly:

    C_Y - C_X       = T X alpha^2 / kappa_T
    kappa_T-kappa_S = T X alpha^2 / C_Y
    C_X / C_Y       = kappa_S / kappa_T
    det g^M         = T / (X kappa_T C_X) = T / (X kappa_S C_Y)
    det g^F         = -gamma det g^M,   gamma = C_Y / C_X
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import MetricTensor2, StatePoint, hessian_scale, singularity_eps
from .jets import Jet3

__all__ = [
    "ResponseSet", "responses_at", "cap_difference_residual",
    "kappa_difference_residual", "ratio_identity_residual",
    "metric_from_responses", "NotApplicableError",
]


class NotApplicableError(ValueError):
    """A response-based reconstruction was requested at a flagged point."""


@dataclass(frozen=True)
class ResponseSet:
    """Temperature, conjugate variable, the five response functions and the
    heat-capacity ratio at one state point.

    Entries that diverge (or are undefined at X = 0) are reported as +-inf /
    nan together with a flag token.
    """

    point: StatePoint
    t: float
    y: float
    c_x: float
    c_y: float
    alpha: float
    kappa_t: float
    kappa_s: float
    gamma: float
    flags: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        """True when every entry is finite and no flag is set."""
        vals = (self.t, self.y, self.c_x, self.c_y, self.alpha,
                self.kappa_t, self.kappa_s, self.gamma)
        return not self.flags and all(math.isfinite(v) for v in vals)


def _safe_div(num: float, den: float) -> float:
    if den == 0.0:
        return math.nan if num == 0.0 else math.copysign(math.inf, num)
    return num / den


def responses_at(jet: Jet3, p: StatePoint, eps: float | None = None) -> ResponseSet:
    """All response functions at one point from the potential jet there.

    The Jacobian relations behind each entry:
    (dS/dT)_X = 1/M_SS, (dS/dT)_Y = M_XX/det H, (dX/dT)_Y = -M_SX/det H,
    (dX/dY)_T = M_SS/det H, (dX/dY)_S = 1/M_XX.

    X must be positive for the susceptibilities; at X == 0 the heat
    capacities are still returned and alpha/kappa become nan with an
    ``undef:X`` flag.  Negative X is rejected.
    """
    eps = singularity_eps() if eps is None else eps
    x = p.x
    if x < 0.0:
        raise ValueError(f"response functions need X >= 0, got X={x!r}")
    t, y = jet.s, jet.x
    mss, msx, mxx = jet.ss, jet.sx, jet.xx
    det_h = mss * mxx - msx * msx
    scale = hessian_scale(jet)
    if abs(mss) < eps * scale and abs(mxx) < eps * scale and abs(det_h) < eps * scale:
        raise ValueError(f"Hessian singular in every direction at {p!r}")

    flags = []
    c_x = _safe_div(t, mss)
    c_y = _safe_div(t * mxx, det_h)
    gamma = _safe_div(mss * mxx, det_h)
    if x > 0.0:
        alpha = _safe_div(-msx, x * det_h)
        kappa_t = _safe_div(mss, x * det_h)
        kappa_s = _safe_div(1.0, x * mxx)
    else:
        alpha = kappa_t = kappa_s = math.nan
        flags.append("undef:X")

    if abs(mss) < eps * scale:
        flags.append("div:CX")
    if abs(det_h) < eps * scale:
        flags.extend(("div:CY", "div:alpha", "div:kappaT"))
    if abs(mxx) < eps * scale:
        flags.append("div:kappaS")
    if t <= 0.0:
        flags.append("neg:T")
    return ResponseSet(point=p, t=t, y=y, c_x=c_x, c_y=c_y, alpha=alpha,
                       kappa_t=kappa_t, kappa_s=kappa_s, gamma=gamma,
                       flags=tuple(flags))


def _applicable(r: ResponseSet, *values: float) -> bool:
    return not any(f.startswith(("div:", "undef:")) for f in r.flags) \
        and all(math.isfinite(v) for v in values)


def cap_difference_residual(r: ResponseSet) -> float:
    """Normalized residual of C_Y - C_X = T X alpha^2 / kappa_T.

    Returns nan when any entry involved is flagged divergent or undefined.
    """
    if not _applicable(r, r.c_x, r.c_y, r.alpha, r.kappa_t) or r.kappa_t == 0.0:
        return math.nan
    resid = r.c_y - r.c_x - r.t * r.point.x * r.alpha ** 2 / r.kappa_t
    return resid / max(abs(r.c_x), abs(r.c_y), 1.0)


def kappa_difference_residual(r: ResponseSet) -> float:
    """Normalized residual of kappa_T - kappa_S = T X alpha^2 / C_Y."""
    if not _applicable(r, r.kappa_t, r.kappa_s, r.alpha, r.c_y) or r.c_y == 0.0:
        return math.nan
    resid = r.kappa_t - r.kappa_s - r.t * r.point.x * r.alpha ** 2 / r.c_y
    return resid / max(abs(r.kappa_t), abs(r.kappa_s), 1.0)


def ratio_identity_residual(r: ResponseSet) -> float:
    """Normalized residual of C_X / C_Y = kappa_S / kappa_T."""
    if not _applicable(r, r.c_x, r.c_y, r.kappa_s, r.kappa_t) \
            or r.c_y == 0.0 or r.kappa_t == 0.0:
        return math.nan
    lhs = r.c_x / r.c_y
    resid = lhs - r.kappa_s / r.kappa_t
    return resid / max(abs(lhs), 1.0)


def metric_from_responses(r: ResponseSet) -> MetricTensor2:
    """Rebuild g^M purely from the response set:
    (T/C_X, -T alpha/(C_X kappa_T), C_Y/(X kappa_T C_X)).

    Must agree componentwise with the Hessian construction; raises
    :class:`NotApplicableError` at flagged or degenerate points.
    """
    needed = (r.c_x, r.c_y, r.alpha, r.kappa_t)
    if not _applicable(r, *needed) or r.c_x == 0.0 or r.kappa_t == 0.0:
        raise NotApplicableError(f"response set not usable for a metric: {r}")
    g11 = r.t / r.c_x
    g12 = -r.t * r.alpha / (r.c_x * r.kappa_t)
    g22 = r.c_y / (r.point.x * r.kappa_t * r.c_x)
    return MetricTensor2(g11, g12, g22, chart="SX", kind="M")
