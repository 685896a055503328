"""Popular sums, the refined subset they induce, and triple coincidence classes.

The threshold for a popular sum value is the average multiplicity divided by
the guarded log L(|A|) = max(1, log2 |A|), rounded up. Rounding up keeps the
threshold integral while preserving the refinement bound, because an unpopular
value then has multiplicity at most ceil(x) - 1 < x.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactmath import PowerSum, ceil_div_guarded_log2, cmp_ps_vs_ps_logpow
from .setcore import DIFF, SUM, FiniteSet, combine, rep_function
from .energy import dominant_class, mixed_sum


def popular_set(A: FiniteSet, C: FiniteSet) -> tuple[FiniteSet, int]:
    """Sum values hit at least ceil(|A||C| / (L(|A|) * |A+C|)) times.

    Returns (P, theta). P is never empty: the maximum multiplicity is an
    integer at least the average, and the threshold never exceeds the
    average's ceiling.
    """
    rep = rep_function(A, SUM, C)
    theta = max(
        1, ceil_div_guarded_log2(len(A) * len(C), rep.support_size(), len(A))
    )
    popular = [s for s, r in rep.counts.items() if r >= theta]
    if not popular:
        raise AssertionError("popularity threshold exceeded the maximum multiplicity")
    return FiniteSet(popular), theta


def refined_set(A: FiniteSet, C: FiniteSet, P: FiniteSet) -> FiniteSet:
    """Elements of A whose sums land in P for at least half of C."""
    pm = P.members()
    cm = list(C)
    keep = [a for a in A if 2 * sum(1 for c in cm if (a + c) in pm) >= len(C)]
    return FiniteSet(keep)


def refined_bound_holds(A: FiniteSet, refined: FiniteSet) -> bool:
    """Exact check of |A'| >= (1 - 2/L(|A|)) |A|, i.e. (|A|-|A'|) L <= 2|A|."""
    dropped = len(A) - len(refined)
    return (
        cmp_ps_vs_ps_logpow(
            PowerSum.from_rational(2 * len(A)),
            PowerSum.from_rational(dropped),
            len(A),
            1,
        )
        >= 0
    )


@dataclass(frozen=True)
class TripleClasses:
    """Triples (a, b, c) with a-b in D and a+c in P, grouped by that key pair."""

    sizes: dict
    total: int

    def class_count(self) -> int:
        return len(self.sizes)

    def second_moment(self) -> int:
        return sum(v * v for v in self.sizes.values())


def equiv_classes(A: FiniteSet, C: FiniteSet, D: FiniteSet, P: FiniteSet) -> TripleClasses:
    """Group admissible triples over A x A x C by the key (a-b, a+c)."""
    if not D.issubset(combine(A, DIFF, A)):
        raise ValueError("difference set D must sit inside A-A")
    if not P.issubset(combine(A, SUM, C)):
        raise ValueError("popular set P must sit inside A+C")
    dm = D.members()
    pm = P.members()
    sizes: dict = {}
    total = 0
    for a in A:
        for b in A:
            d = a - b
            if d not in dm:
                continue
            for c in C:
                s = a + c
                if s in pm:
                    key = (d, s)
                    sizes[key] = sizes.get(key, 0) + 1
                    total += 1
    return TripleClasses(sizes, total)


def key_solution_count(D: FiniteSet, P: FiniteSet, S: FiniteSet) -> int:
    """#{(d, s) in D x P : s - d in S}; an upper bound for the class count."""
    sm = S.members()
    return sum(1 for d in D for s in P if (s - d) in sm)


@dataclass(frozen=True)
class PipelineReport:
    theta: int
    popular: FiniteSet
    refined: FiniteSet
    delta: int
    diff_class: FiniteSet
    triples: TripleClasses
    refined_bound_ok: bool
    count_cross_check_ok: bool
    cs_ok: bool
    mixed_ok: bool
    mixed_value: int
    key_bound: int

    def all_ok(self) -> bool:
        return (
            self.refined_bound_ok
            and self.count_cross_check_ok
            and self.cs_ok
            and self.mixed_ok
            and self.triples.class_count() <= self.key_bound
        )


def energy_general_pipeline(A: FiniteSet, C: FiniteSet) -> PipelineReport:
    """Popular sums -> refined subset -> dominant difference class -> triples.

    Verifies, all exactly: the refined-set cardinality bound, agreement of the
    grouped triple count with a direct enumeration, the Cauchy-Schwarz link
    N**2 <= (class count) * (second moment), the second-moment bound by the
    mixed multiplicity sum, and the class-count bound by key solutions.
    """
    P, theta = popular_set(A, C)
    refined = refined_set(A, C, P)
    bound_ok = refined_bound_holds(A, refined)

    diff_rep = rep_function(refined, DIFF, refined)
    dom = dominant_class(diff_rep, 3)
    D = FiniteSet(dom.members)

    triples = equiv_classes(refined, C, D, P)

    # independent total: for each (a, c) with a+c popular, count b with a-b in D
    dm = D.members()
    pm = P.members()
    direct = 0
    for a in refined:
        row = sum(1 for b in refined if (a - b) in dm)
        for c in C:
            if (a + c) in pm:
                direct += row
    count_ok = direct == triples.total

    m2 = triples.second_moment()
    cs_ok = triples.total**2 <= triples.class_count() * m2

    mixed = mixed_sum(diff_rep, rep_function(C, DIFF, C))
    mixed_ok = m2 <= mixed

    key_bound = key_solution_count(D, P, combine(refined, SUM, C))

    return PipelineReport(
        theta=theta,
        popular=P,
        refined=refined,
        delta=dom.t,
        diff_class=D,
        triples=triples,
        refined_bound_ok=bound_ok,
        count_cross_check_ok=count_ok,
        cs_ok=cs_ok,
        mixed_ok=mixed_ok,
        mixed_value=mixed,
        key_bound=key_bound,
    )
