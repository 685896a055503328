"""Point-line incidences over rational coordinates, counted two independent ways.

A line is a (slope, intercept) pair for y = slope*x + intercept. The scan
route tests every point against every line; the join route groups lines by
slope and hashes each point's intercept against that slope. Both are exact,
and agreement between them is part of the test contract, so neither may be
expressed through the other.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .numeric import canon
from .setcore import PROD, SUM, FiniteSet, combine
from .energy import energy


def count_incidences(points, lines) -> int:
    """Direct scan: for each line, walk all points and test membership."""
    pts = [(canon(x), canon(y)) for x, y in points]
    total = 0
    for slope, intercept in lines:
        slope = canon(slope)
        intercept = canon(intercept)
        total += sum(1 for x, y in pts if y == slope * x + intercept)
    return total


def count_incidences_hashjoin(points, lines) -> int:
    """Slope-grouped route: hash y - slope*x over points, look up intercepts."""
    by_slope: dict = {}
    for slope, intercept in lines:
        by_slope.setdefault(canon(slope), []).append(canon(intercept))
    pts = [(canon(x), canon(y)) for x, y in points]
    total = 0
    for slope, intercepts in by_slope.items():
        residues = Counter(y - slope * x for x, y in pts)
        total += sum(residues[b] for b in intercepts)
    return total


def count_incidences_grid(X: FiniteSet, Y: FiniteSet, lines) -> int:
    """Incidences against the product point set X x Y, exploiting the grid."""
    ym = Y.members()
    total = 0
    for slope, intercept in lines:
        slope = canon(slope)
        intercept = canon(intercept)
        total += sum(1 for x in X if (slope * x + intercept) in ym)
    return total


def lines_from(A: FiniteSet) -> list[tuple]:
    """The |A|**2 lines y = a*x + a' over ordered pairs of A; slope 0 is barred."""
    if 0 in A:
        raise ValueError("slope set must not contain 0")
    return [(a, a2) for a in A for a2 in A]


def count_solutions_qr(Q: FiniteSet, R: FiniteSet, B: FiniteSet, C: FiniteSet) -> int:
    """#{(q, r, b, c) : c = q*r - b}, exactly, with an incidence cross-check.

    The same count is the number of incidences between the point grid R x B
    and the lines y = q*x - c, which is asserted on every call.
    """
    hist: Counter = Counter()
    for q in Q:
        for r in R:
            qr = q * r
            for b in B:
                hist[qr - b] += 1
    total = sum(hist[canon(c)] for c in C)
    lines = [(q, -c) for q in Q for c in C]
    cross = count_incidences_grid(R, B, lines)
    if cross != total:
        raise AssertionError(
            f"solution count {total} disagrees with incidence count {cross}"
        )
    return total


@dataclass(frozen=True)
class LineEnergyReport:
    incidences: int
    lower_bound: int
    n_lines: int
    n_points: int
    product_shift_size: int
    fourth_ratio_energy: int
    upper_trend: float


def line_energy_experiment(A: FiniteSet, B: FiniteSet) -> LineEnergyReport:
    """Incidences of the |A|**2 lines with the grid B x (AB + A).

    Every line y = a*x + a' meets the grid in at least |B| points, so the
    count is at least |A|**2 |B|; that is asserted exactly. The reported
    trend value is the incidence bound shape
        E4x(A)**(1/12) |A|**(7/6) |B|**(2/3) |C|**(1/2) + |A|**2 |C|**(1/2)
    with C = AB + A and the fourth multiplicative self-energy E4x.
    """
    shifted = combine(combine(A, PROD, B), SUM, A)
    lines = lines_from(A)
    inc = count_incidences_grid(B, shifted, lines)
    lower = len(A) ** 2 * len(B)
    if inc < lower:
        raise AssertionError(f"incidence count {inc} fell under {lower}")
    e4 = energy(A, None, 4, "ratio").value
    nc = len(shifted)
    trend = (
        float(e4) ** (1 / 12)
        * len(A) ** (7 / 6)
        * len(B) ** (2 / 3)
        * nc**0.5
        + len(A) ** 2 * nc**0.5
    )
    return LineEnergyReport(
        incidences=inc,
        lower_bound=lower,
        n_lines=len(lines),
        n_points=len(B) * nc,
        product_shift_size=nc,
        fourth_ratio_energy=int(e4),
        upper_trend=trend,
    )


def ratio_quadruple_count(A: FiniteSet, allow_large: bool = False) -> int:
    """sum over v of N(v)**2 where N(v) = #{(a1,a2,a3,a4) : (a1-a2)/(a3-a4) = v}.

    Denominators are nonzero by definition; numerators may vanish. The count
    is quartic work on a quartic histogram, so sizes above 12 are refused
    unless allow_large is set.
    """
    if len(A) > 12 and not allow_large:
        raise ValueError(
            f"|A| = {len(A)} quadruple histogram refused; pass allow_large=True"
        )
    vals = list(A)
    nums = [a - b for a in vals for b in vals]
    dens = [a - b for a in vals for b in vals if a != b]
    hist: Counter = Counter()
    if A.backend == "exact":
        for num in nums:
            fn = Fraction(num)
            for den in dens:
                hist[fn / den] += 1
    else:
        from .numeric import Tolerance, tolerant_groups

        tol = Tolerance(A.tau)
        raw = [num / den for num in nums for den in dens]
        for group in tolerant_groups(raw, tol):
            hist[group[0]] += len(group)
    return sum(n * n for n in hist.values())
