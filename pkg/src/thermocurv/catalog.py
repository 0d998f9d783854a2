"""Built-in potentials with closed-form reference curvatures.

Each entry pairs a parsed potential with independently known reference
expressions for both curvature scalars and for the divergence function whose
zero set is the constant-X heat-capacity line.  The references are
transcribed literally; golden tests compare the computed pipeline against
them and any disagreement is surfaced, never reconciled in place.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .potentials import PotentialSpec, parse_potential, potential_to_json

__all__ = ["CatalogEntry", "GridAxis", "get_entry", "entry_names",
           "UnknownPotentialError"]


class UnknownPotentialError(KeyError):
    pass


@dataclass(frozen=True)
class GridAxis:
    lo: float
    hi: float
    count: int
    spacing: str = "linear"


@dataclass(frozen=True)
class CatalogEntry:
    spec: PotentialSpec
    reference_rm: Callable[[float, float], float]
    reference_rf: Callable[[float, float], float]
    reference_f: Callable[[float, float], float]
    notes: str
    # in_domain guards the physically sensible region (positive temperature)
    in_domain: Callable[[float, float], bool]
    default_grid: tuple[GridAxis, GridAxis]

    def to_json(self) -> dict:
        return potential_to_json(self.spec)


def _rn() -> CatalogEntry:
    spec = parse_potential(
        "sqrt(S)/2 * (1 + Q^2/S)", ("S", "Q"), name="reissner-nordstrom")

    def rm(s, q):
        return 2.0 * s ** 1.5 / (s - q * q) ** 2

    def rf(s, q):
        return 4.0 * s ** 1.5 / (s - 3.0 * q * q) ** 2

    def f(s, q):
        return s - 3.0 * q * q

    return CatalogEntry(
        spec=spec, reference_rm=rm, reference_rf=rf, reference_f=f,
        notes=("four-dimensional charged black hole; mass potential "
               "sqrt(S)/2 (1 + Q^2/S); heat-capacity line at S = 3 Q^2"),
        in_domain=lambda s, q: s > q * q,
        default_grid=(GridAxis(0.5, 10.0, 12, "log"),
                      GridAxis(0.05, 0.45, 12, "log")),
    )


def _kerr() -> CatalogEntry:
    spec = parse_potential("sqrt(S/4 + J^2/S)", ("S", "J"), name="kerr")

    def f(s, j):
        return s ** 4 - 24.0 * s * s * j * j - 48.0 * j ** 4

    def rm(s, j):
        return 0.0

    def rf(s, j):
        return (18.0 * (s * s + 4.0 * j * j) ** 3.5 * (s * s - 4.0 * j * j)
                / (s ** 1.5 * f(s, j) ** 2))

    return CatalogEntry(
        spec=spec, reference_rm=rm, reference_rf=rf, reference_f=f,
        notes=("four-dimensional rotating black hole; mass potential "
               "sqrt(S/4 + J^2/S); flat mass-Hessian geometry"),
        in_domain=lambda s, j: s > 2.0 * j,
        default_grid=(GridAxis(1.0, 10.0, 12, "log"),
                      GridAxis(0.05, 0.45, 12, "log")),
    )


def _quadratic() -> CatalogEntry:
    spec = parse_potential("S^2/2 + X^2/2", ("S", "X"), name="quadratic-toy")
    return CatalogEntry(
        spec=spec,
        reference_rm=lambda s, x: 0.0,
        reference_rf=lambda s, x: 0.0,
        reference_f=lambda s, x: 1.0,   # M_SS == 1: no divergence line
        notes="flat toy potential with identity Hessian",
        in_domain=lambda s, x: True,
        default_grid=(GridAxis(0.5, 4.0, 8, "linear"),
                      GridAxis(0.5, 4.0, 8, "linear")),
    )


_BUILDERS = {
    "reissner-nordstrom": _rn,
    "kerr": _kerr,
    "quadratic-toy": _quadratic,
}


def entry_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILDERS))


def get_entry(name: str) -> CatalogEntry:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownPotentialError(
            f"unknown potential {name!r}; known: {', '.join(entry_names())}"
        ) from None
    return builder()
