"""Moment energies of multiplicity functions and their dyadic level structure.

The k-th energy of a pair (A, B) under a set operation is sum_x r(x)**k over
the multiplicity function r of that operation. Integer k gives exact integer
values; fractional k gives an exact radical sum that is compared exactly and
reported as a binary64 float derived from it.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .exactmath import PowerSum, cmp_ps, floor_log2, qfree_pow
from .setcore import FiniteSet, RepFunction, rep_function


def _check_k(k) -> Fraction:
    k = Fraction(k)
    if k < 1:
        raise ValueError(f"moment exponent must be >= 1, got {k}")
    return k


def power_sum_from_hist(hist: dict[int, int], k: Fraction) -> PowerSum:
    """Exact sum over the count histogram: sum_r hist[r] * r**k."""
    if k.denominator == 1:
        e = k.numerator
        total = sum(cnt * r**e for r, cnt in hist.items())
        return PowerSum.from_rational(total)
    acc: dict[int, Fraction] = {}
    for r, cnt in hist.items():
        u, m = qfree_pow(r, k.numerator, k.denominator)
        acc[m] = acc.get(m, Fraction(0)) + cnt * u
    return PowerSum(k.denominator, acc)


@dataclass(frozen=True)
class EnergyValue:
    """One moment energy; `value` is int for integer k, binary64 otherwise."""

    k: Fraction
    op: str
    value: object
    exact: PowerSum

    def __float__(self) -> float:
        return float(self.value)


def _energy_from_hist(hist: dict[int, int], k: Fraction, op: str) -> EnergyValue:
    ps = power_sum_from_hist(hist, k)
    if k.denominator == 1:
        return EnergyValue(k, op, int(ps.rational_value()), ps)
    return EnergyValue(k, op, ps.float_value(), ps)


def energy_of_rep(rep: RepFunction, k) -> EnergyValue:
    k = _check_k(k)
    return _energy_from_hist(rep.count_histogram(), k, rep.op)


def energy(A: FiniteSet, B: FiniteSet | None, k, op: str) -> EnergyValue:
    """E_k of the pair (A, B) under op; B defaults to A."""
    if B is None:
        B = A
    return energy_of_rep(rep_function(A, op, B), k)


def restricted_energy(rep: RepFunction, D, k) -> EnergyValue:
    """sum over x in D of r(x)**k; values outside the support contribute 0."""
    k = _check_k(k)
    hist: Counter = Counter()
    for x in D:
        r = rep.get(x)
        if r:
            hist[r] += 1
    return _energy_from_hist(dict(hist), k, rep.op)


def restricted_mass(rep: RepFunction, D) -> int:
    """sum over x in D of r(x); the number of ordered pairs landing in D."""
    return sum(rep.get(x) for x in D)


def mixed_sum(rep1: RepFunction, rep2: RepFunction):
    """sum_t r1(t)**2 * r2(t), exact; the cross term of two multiplicities."""
    return sum(c * c * rep2.get(t) for t, c in rep1.counts.items())


@dataclass(frozen=True)
class DyadicClass:
    """Support values whose multiplicity lies in [t, 2t) for one scale t."""

    t: int
    members: tuple
    contribution: PowerSum
    contribution_value: object

    @property
    def size(self) -> int:
        return len(self.members)


def dyadic_decompose(rep: RepFunction, k) -> list[DyadicClass]:
    """Partition the support by dyadic multiplicity scale, ascending t.

    Every support value lands in exactly one class, and the class
    contributions add up to the full energy; both facts are asserted.
    """
    k = _check_k(k)
    if not rep.counts:
        raise ValueError("empty support has no dyadic structure")
    by_t: dict[int, list] = {}
    for x, r in rep.counts.items():
        by_t.setdefault(1 << floor_log2(r), []).append(x)
    classes = []
    for t in sorted(by_t):
        members = tuple(sorted(by_t[t]))
        hist = Counter(rep.counts[x] for x in members)
        for r in hist:
            if not t <= r < 2 * t:
                raise AssertionError(f"multiplicity {r} escaped its scale [{t},{2*t})")
        ev = _energy_from_hist(dict(hist), k, rep.op)
        classes.append(DyadicClass(t, members, ev.exact, ev.value))
    if sum(len(c.members) for c in classes) != rep.support_size():
        raise AssertionError("dyadic classes do not partition the support")
    total = PowerSum.zero()
    for c in classes:
        total = total + c.contribution
    if cmp_ps(total, energy_of_rep(rep, k).exact) != 0:
        raise AssertionError("dyadic contributions do not sum to the energy")
    return classes


def dominant_class(rep: RepFunction, k) -> DyadicClass:
    """The dyadic class with the largest exact contribution.

    Tie rule: prefer the larger scale t (a tie within one t cannot occur since
    scales are unique). The two-sided sandwich against the full energy is
    asserted exactly, with the class count as the log factor:
        size * t**k <= E_k <= 2**k * size * t**k * (number of classes)
    and the class count never exceeds floor(log2(min(|A|, |B|))) + 1.
    """
    k = _check_k(k)
    classes = dyadic_decompose(rep, k)
    best = classes[0]
    for c in classes[1:]:
        if cmp_ps(c.contribution, best.contribution) >= 0:
            best = c  # equal contributions resolve to the larger t
    n_classes = len(classes)
    if n_classes > floor_log2(min(rep.left_size, rep.right_size)) + 1:
        raise AssertionError("more dyadic classes than the multiplicity range allows")
    total = energy_of_rep(rep, k).exact
    lower = PowerSum.integer_power(best.t, k, best.size)
    upper = PowerSum.integer_power(2 * best.t, k, best.size * n_classes)
    if cmp_ps(lower, total) > 0:
        raise AssertionError("dominant class lower sandwich failed")
    if cmp_ps(total, upper) > 0:
        raise AssertionError("dominant class upper sandwich failed")
    return best
