"""Forward-mode jets: exact values and partial derivatives to third order
in two independent variables.

A :class:`Jet3` carries the ten Taylor coefficients of a scalar quantity at
a point (value, two first partials, three second partials, four third
partials).  Arithmetic on jets propagates all coefficients exactly through
the truncated Leibniz / chain rules, so an expression built from jets yields
machine-precision derivatives with no differencing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

# Raw division floor: below this the quotient is treated as a true
# singularity.  The conditioning floor only triggers a warning, so callers
# can tell a genuine pole from a division that merely lost digits.
DIVISION_FLOOR = 1e-300
CONDITIONING_FLOOR = 1e-12

# Exponents up to this size are expanded by repeated multiplication; this
# keeps integer powers of negative bases exact.
_MAX_INT_POW = 100


class DomainError(ValueError):
    """An elementary function was evaluated outside its domain."""

    def __init__(self, func: str, value, detail: str = ""):
        self.func = func
        self.value = value
        msg = f"{func} undefined for value {value!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class ConditioningWarning(UserWarning):
    """Division by a value small enough to amplify rounding error."""


@dataclass(frozen=True, slots=True)
class Jet3:
    """Truncated third-order Taylor expansion in the variables (s, x).

    Coefficients are plain partial derivatives (not divided by factorials).
    Mixed partials are stored once; symmetry is structural.
    """

    v: float
    s: float = 0.0
    x: float = 0.0
    ss: float = 0.0
    sx: float = 0.0
    xx: float = 0.0
    sss: float = 0.0
    ssx: float = 0.0
    sxx: float = 0.0
    xxx: float = 0.0

    @property
    def d1(self) -> tuple[float, float]:
        return (self.s, self.x)

    @property
    def d2(self) -> tuple[float, float, float]:
        return (self.ss, self.sx, self.xx)

    @property
    def d3(self) -> tuple[float, float, float, float]:
        return (self.sss, self.ssx, self.sxx, self.xxx)

    def coeffs(self) -> tuple[float, ...]:
        """All ten coefficients in storage order."""
        return (self.v, self.s, self.x, self.ss, self.sx, self.xx,
                self.sss, self.ssx, self.sxx, self.xxx)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return Jet3(*(a + b for a, b in zip(self.coeffs(), o.coeffs())))

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return Jet3(*(a - b for a, b in zip(self.coeffs(), o.coeffs())))

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Jet3(*(-a for a in self.coeffs()))

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a, b = self, o
        # Leibniz rule through third order; terms are grouped in pairs that
        # swap into each other, which makes the product commute bit-exactly.
        return Jet3(
            a.v * b.v,
            a.s * b.v + a.v * b.s,
            a.x * b.v + a.v * b.x,
            (a.ss * b.v + a.v * b.ss) + 2.0 * (a.s * b.s),
            (a.sx * b.v + a.v * b.sx) + (a.s * b.x + a.x * b.s),
            (a.xx * b.v + a.v * b.xx) + 2.0 * (a.x * b.x),
            (a.sss * b.v + a.v * b.sss) + 3.0 * (a.ss * b.s + a.s * b.ss),
            ((a.ssx * b.v + a.v * b.ssx) + (a.ss * b.x + a.x * b.ss)
             + 2.0 * (a.sx * b.s + a.s * b.sx)),
            ((a.sxx * b.v + a.v * b.sxx) + (a.xx * b.s + a.s * b.xx)
             + 2.0 * (a.sx * b.x + a.x * b.sx)),
            (a.xxx * b.v + a.v * b.xxx) + 3.0 * (a.xx * b.x + a.x * b.xx),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self * _reciprocal(o)

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o * _reciprocal(self)

    def __pow__(self, exponent):
        if isinstance(exponent, (int, float)):
            return power(self, exponent)
        return NotImplemented


def _coerce(value) -> Jet3 | None:
    if isinstance(value, Jet3):
        return value
    if isinstance(value, (int, float)):
        return Jet3(float(value))
    return None


def jet_var(index: int, value: float) -> Jet3:
    """Seed jet for one of the two independent variables (0 = s, 1 = x)."""
    if index == 0:
        return Jet3(float(value), s=1.0)
    if index == 1:
        return Jet3(float(value), x=1.0)
    raise ValueError(f"variable index must be 0 or 1, got {index}")


def jet_const(value: float) -> Jet3:
    """Constant jet: all derivative coefficients zero."""
    return Jet3(float(value))


def _compose(u: Jet3, c0: float, c1: float, c2: float, c3: float) -> Jet3:
    """Univariate chain rule to third order.

    ``c0..c3`` are the derivatives of the outer function at ``u.v``.
    """
    us, ux = u.s, u.x
    return Jet3(
        c0,
        c1 * us,
        c1 * ux,
        c2 * us * us + c1 * u.ss,
        c2 * us * ux + c1 * u.sx,
        c2 * ux * ux + c1 * u.xx,
        c3 * us ** 3 + 3.0 * c2 * us * u.ss + c1 * u.sss,
        c3 * us * us * ux + c2 * (2.0 * us * u.sx + ux * u.ss) + c1 * u.ssx,
        c3 * us * ux * ux + c2 * (2.0 * ux * u.sx + us * u.xx) + c1 * u.sxx,
        c3 * ux ** 3 + 3.0 * c2 * ux * u.xx + c1 * u.xxx,
    )


def _reciprocal(u: Jet3) -> Jet3:
    v = u.v
    if abs(v) < DIVISION_FLOOR:
        raise DomainError("div", v, "division by (near-)zero value")
    if abs(v) < CONDITIONING_FLOOR:
        warnings.warn(
            f"division by small value {v!r}; results may be ill-conditioned",
            ConditioningWarning,
            stacklevel=3,
        )
    inv = 1.0 / v
    # d/du 1/u = -1/u^2, 2/u^3, -6/u^4
    return _compose(u, inv, -inv * inv, 2.0 * inv ** 3, -6.0 * inv ** 4)


def sqrt(u):
    """Square root of a jet or scalar (strictly positive value for jets)."""
    if isinstance(u, Jet3):
        if u.v <= 0.0:
            raise DomainError("sqrt", u.v)
        r = math.sqrt(u.v)
        return _compose(u, r, 0.5 / r, -0.25 / (r * u.v), 0.375 / (r * u.v * u.v))
    if u < 0.0:
        raise DomainError("sqrt", u)
    return math.sqrt(u)


def exp(u):
    if isinstance(u, Jet3):
        e = math.exp(u.v)
        return _compose(u, e, e, e, e)
    return math.exp(u)


def ln(u):
    """Natural logarithm (value must be strictly positive)."""
    if isinstance(u, Jet3):
        if u.v <= 0.0:
            raise DomainError("ln", u.v)
        inv = 1.0 / u.v
        return _compose(u, math.log(u.v), inv, -inv * inv, 2.0 * inv ** 3)
    if u <= 0.0:
        raise DomainError("ln", u)
    return math.log(u)


def _int_pow(u, n: int):
    """Repeated-multiplication power; exact for integer exponents."""
    if n == 0:
        return jet_const(1.0) if isinstance(u, Jet3) else 1.0
    if n < 0:
        base = _int_pow(u, -n)
        if isinstance(base, Jet3):
            return _reciprocal(base)
        if abs(base) < DIVISION_FLOOR:
            raise DomainError("pow", base, "zero base with negative exponent")
        return 1.0 / base
    result = None
    square = u
    while n:
        if n & 1:
            result = square if result is None else result * square
        n >>= 1
        if n:
            square = square * square
    return result


def power(u, p):
    """u**p for constant exponent p.

    Integer exponents (up to +-100) use repeated multiplication, which stays
    exact for negative bases; anything else needs a positive base.
    """
    if isinstance(p, float) and p.is_integer() and abs(p) <= _MAX_INT_POW:
        p = int(p)
    if isinstance(p, int) and abs(p) <= _MAX_INT_POW:
        return _int_pow(u, p)
    value = u.v if isinstance(u, Jet3) else u
    if value <= 0.0:
        raise DomainError("pow", value, f"non-integer exponent {p!r} needs a positive base")
    if isinstance(u, Jet3):
        c0 = math.pow(value, p)
        c1 = p * math.pow(value, p - 1.0)
        c2 = p * (p - 1.0) * math.pow(value, p - 2.0)
        c3 = p * (p - 1.0) * (p - 2.0) * math.pow(value, p - 3.0)
        return _compose(u, c0, c1, c2, c3)
    return math.pow(value, p)
