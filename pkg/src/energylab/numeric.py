"""Scalar values on two backends: exact rationals and tolerance-collided floats.

All counting downstream is about exact coincidences, so the exact backend is
the default everywhere. Floats enter only through transcendental function
images (exp, log), and there equality is relative-tolerance collision with a
deterministic sort-and-merge dedup rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

EXACT = "exact"
TOLERANT = "tolerant"


class BackendMismatch(ValueError):
    """Raised when an operation mixes exact and tolerant scalars."""


def backend_of(v) -> str:
    if isinstance(v, float):
        return TOLERANT
    if isinstance(v, (int, Fraction)):
        return EXACT
    raise TypeError(f"not a scalar value: {v!r}")


def canon(v):
    """Canonical stored form: int when integral, Fraction otherwise, float as is."""
    if isinstance(v, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError(f"non-finite float rejected: {v!r}")
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else v
    raise TypeError(f"not a scalar value: {v!r}")


@dataclass(frozen=True)
class Scalar:
    """A single set element; backend is implied by the value type."""

    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", canon(self.value))

    @property
    def backend(self) -> str:
        return backend_of(self.value)

    def __str__(self) -> str:
        return format_value(self.value)


@dataclass(frozen=True)
class Tolerance:
    tau: float = 1e-9

    def __post_init__(self):
        if not (self.tau >= 0 and math.isfinite(self.tau)):
            raise ValueError("tau must be a finite nonnegative float")


DEFAULT_TOLERANCE = Tolerance()


def _pair(a, b):
    av = a.value if isinstance(a, Scalar) else canon(a)
    bv = b.value if isinstance(b, Scalar) else canon(b)
    if backend_of(av) != backend_of(bv):
        raise BackendMismatch(
            f"backend mismatch: {format_value(av)} is {backend_of(av)}, "
            f"{format_value(bv)} is {backend_of(bv)}"
        )
    return av, bv


def add(a, b) -> Scalar:
    av, bv = _pair(a, b)
    return Scalar(av + bv)


def mul(a, b) -> Scalar:
    av, bv = _pair(a, b)
    return Scalar(av * bv)


def div(a, b, tol: Tolerance = DEFAULT_TOLERANCE) -> Scalar:
    av, bv = _pair(a, b)
    if backend_of(bv) == EXACT:
        if bv == 0:
            raise ZeroDivisionError(f"division by zero operand {format_value(bv)}")
        return Scalar(Fraction(av) / Fraction(bv))
    if abs(bv) <= tol.tau:
        raise ZeroDivisionError(
            f"division by near-zero operand {bv!r} (tau={tol.tau})"
        )
    return Scalar(av / bv)


def collide(a, b, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Relative-tolerance equality for tolerant scalars; symmetric by construction."""
    av, bv = _pair(a, b)
    if backend_of(av) != TOLERANT:
        raise BackendMismatch("collide is defined on the tolerant backend only")
    return abs(av - bv) <= tol.tau * max(1.0, abs(av), abs(bv))


def merge_tolerant(values, tol: Tolerance = DEFAULT_TOLERANCE) -> list[float]:
    """Deduplicate floats by sorting and merging adjacent values within tolerance.

    Pairwise collision is not transitive, so dedup is defined by adjacency
    chains after sorting; each merged group is represented by its smallest
    member. Deterministic for any input order.
    """
    vs = sorted(canon(v) for v in values)
    out: list[float] = []
    for v in vs:
        if out and abs(v - out[-1]) <= tol.tau * max(1.0, abs(v), abs(out[-1])):
            continue  # joins the group represented by out[-1]
        out.append(v)
    return out


def tolerant_groups(values, tol: Tolerance = DEFAULT_TOLERANCE) -> list[list[float]]:
    """Adjacency-merged groups of a float multiset, sorted, smallest-first."""
    vs = sorted(canon(v) for v in values)
    groups: list[list[float]] = []
    for v in vs:
        if groups and abs(v - groups[-1][-1]) <= tol.tau * max(
            1.0, abs(v), abs(groups[-1][-1])
        ):
            groups[-1].append(v)
        else:
            groups.append([v])
    return groups


def parse_value(text: str):
    """Parse one scalar token: "p/q" and integers are exact, decimals tolerant."""
    t = text.strip()
    if not t:
        raise ValueError("empty scalar token")
    if "/" in t:
        num, _, den = t.partition("/")
        return canon(Fraction(int(num), int(den)))
    try:
        return int(t)
    except ValueError:
        pass
    v = float(t)
    if not math.isfinite(v):
        raise ValueError(f"non-finite scalar rejected: {text!r}")
    return v


def format_value(v) -> str:
    v = canon(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return str(v)
